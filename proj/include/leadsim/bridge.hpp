#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include <json.hpp>

#include "leadsim/sim.hpp"

namespace leadsim {

/// Newline-delimited JSON protocol version spoken by the bridge.
inline constexpr int kBridgeProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultBridgePort = 7025;

/// One tracker frame: where the fish and robot are right now.
struct ObservationFrame {
    std::int64_t step = 0;
    Scalar time_s = 0;
    Vec2 fish = Vec2::Zero();
    std::optional<Scalar> fish_heading;  ///< derived from motion when absent
    Vec2 robot = Vec2::Zero();
    Scalar robot_heading = 0;
};

/// One controller reply: where the robot should go.
struct CommandFrame {
    std::int64_t step = 0;
    Vec2 target = Vec2::Zero();
    Scalar speed_factor = 0;
    Phase phase = Phase::Milling;
    Scalar carefulness = 0;
};

nlohmann::json observation_to_json(const ObservationFrame& frame);
ObservationFrame observation_from_json(const nlohmann::json& j);
nlohmann::json command_to_json(const CommandFrame& frame);
CommandFrame command_from_json(const nlohmann::json& j);

struct BridgeConfig {
    ModeConfig mode;
    UpdateLaw law = UpdateLaw::Integrator;
    ParamSet params;
    TrialProtocol protocol;
    std::uint64_t seed = 0;
};

/// TCP server that runs the controller over newline-delimited JSON. Each
/// connection is an independent session with fresh controller state and the
/// same derived RNG stream, so reconnecting replays a trial exactly. The
/// first line sent on accept is a hello describing the protocol; every
/// request line then gets exactly one reply line. Malformed input earns an
/// error reply and the session continues; a non-increasing step number earns
/// an error reply with "reset": true and the session state starts over.
class BridgeServer {
  public:
    /// Binds and listens immediately; port 0 picks an ephemeral port.
    BridgeServer(const BridgeConfig& config, std::uint16_t port = kDefaultBridgePort);
    ~BridgeServer();

    BridgeServer(const BridgeServer&) = delete;
    BridgeServer& operator=(const BridgeServer&) = delete;

    std::uint16_t port() const { return port_; }

    /// Accept loop; returns after shutdown().
    void serve();
    /// serve() on a background thread.
    void start();
    /// Stop accepting, close live sessions, join the background thread.
    void shutdown();

  private:
    void handle_session(int fd);

    BridgeConfig config_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex mutex_;
    std::set<int> session_fds_;
    std::vector<std::thread> session_threads_;
};

/// Client side: connects, reads the hello, then exchanges one line per step.
class BridgeClient {
  public:
    BridgeClient(const std::string& host, std::uint16_t port, int connect_timeout_ms = 2000);
    ~BridgeClient();

    BridgeClient(const BridgeClient&) = delete;
    BridgeClient& operator=(const BridgeClient&) = delete;

    const nlohmann::json& hello() const { return hello_; }

    /// Send one observation and wait for the command reply. Throws on
    /// timeout, closed connection, or an error reply.
    CommandFrame step(const ObservationFrame& frame, int timeout_ms = 200);

    /// Raw line exchange (tests poke the protocol with this).
    std::string round_trip(const std::string& line, int timeout_ms = 200);

  private:
    std::string read_line(int timeout_ms);
    int fd_ = -1;
    std::string buffer_;
    nlohmann::json hello_;
};

/// ControllerDriver that forwards observations to a bridge server and
/// mirrors the score bookkeeping locally, so a trial run through the bridge
/// produces the same record as an in-process run.
class RemoteControllerDriver final : public ControllerDriver {
  public:
    RemoteControllerDriver(BridgeClient& client, const ParamSet& params);
    ControlFrame step(const Observation& obs, Scalar dt) override;

  private:
    BridgeClient& client_;
    ParamSet params_;
    std::int64_t next_step_ = 0;
    ScoreState scores_;
    bool has_prev_robot_ = false;
    Vec2 prev_robot_pos_ = Vec2::Zero();
    Phase last_phase_ = Phase::Milling;
    int approach_index_ = 0;
};

}  // namespace leadsim
