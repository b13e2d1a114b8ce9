#include "leadsim/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "leadsim/controller.hpp"

namespace leadsim {

namespace {

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

/// Send a whole buffer, retrying on partial writes. Returns false when the
/// peer is gone.
bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n =
            ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

bool send_line(int fd, const nlohmann::json& j) { return send_all(fd, j.dump() + "\n"); }

}  // namespace

nlohmann::json observation_to_json(const ObservationFrame& frame) {
    nlohmann::json fish = {{"x", frame.fish.x()}, {"y", frame.fish.y()}};
    if (frame.fish_heading) fish["heading"] = *frame.fish_heading;
    return {{"step", frame.step},
            {"time_s", frame.time_s},
            {"fish", fish},
            {"robot",
             {{"x", frame.robot.x()}, {"y", frame.robot.y()}, {"heading", frame.robot_heading}}}};
}

ObservationFrame observation_from_json(const nlohmann::json& j) {
    ObservationFrame f;
    f.step = j.at("step").get<std::int64_t>();
    f.time_s = j.at("time_s").get<Scalar>();
    const auto& fish = j.at("fish");
    f.fish = Vec2(fish.at("x").get<Scalar>(), fish.at("y").get<Scalar>());
    if (fish.contains("heading")) f.fish_heading = fish.at("heading").get<Scalar>();
    const auto& robot = j.at("robot");
    f.robot = Vec2(robot.at("x").get<Scalar>(), robot.at("y").get<Scalar>());
    f.robot_heading = robot.value("heading", Scalar(0));
    return f;
}

nlohmann::json command_to_json(const CommandFrame& frame) {
    return {{"step", frame.step},
            {"target", {{"x", frame.target.x()}, {"y", frame.target.y()}}},
            {"speed_factor", frame.speed_factor},
            {"phase", std::string(1, phase_char(frame.phase))},
            {"carefulness", frame.carefulness}};
}

CommandFrame command_from_json(const nlohmann::json& j) {
    CommandFrame f;
    f.step = j.at("step").get<std::int64_t>();
    const auto& target = j.at("target");
    f.target = Vec2(target.at("x").get<Scalar>(), target.at("y").get<Scalar>());
    f.speed_factor = j.at("speed_factor").get<Scalar>();
    const auto phase = j.at("phase").get<std::string>();
    if (phase.size() != 1) throw std::invalid_argument("bad phase '" + phase + "'");
    f.phase = phase_from_char(phase[0]);
    f.carefulness = j.at("carefulness").get<Scalar>();
    return f;
}

BridgeServer::BridgeServer(const BridgeConfig& config, std::uint16_t port) : config_(config) {
    config_.params.validate();
    config_.protocol.validate();

    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("bridge: socket() failed");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        const std::string msg = std::strerror(errno);
        close_fd(listen_fd_);
        throw std::runtime_error("bridge: cannot bind port " + std::to_string(port) + ": " + msg);
    }
    if (::listen(listen_fd_, 8) < 0) {
        close_fd(listen_fd_);
        throw std::runtime_error("bridge: listen() failed");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

BridgeServer::~BridgeServer() { shutdown(); }

void BridgeServer::serve() {
    while (!stopping_.load()) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            break;  // listen socket closed by shutdown()
        }
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        std::lock_guard<std::mutex> lock(mutex_);
        if (stopping_.load()) {
            ::close(fd);
            break;
        }
        session_fds_.insert(fd);
        session_threads_.emplace_back([this, fd]() { handle_session(fd); });
    }
}

void BridgeServer::start() {
    accept_thread_ = std::thread([this]() { serve(); });
}

void BridgeServer::shutdown() {
    if (stopping_.exchange(true)) {
        if (accept_thread_.joinable()) accept_thread_.join();
        return;
    }
    if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
    close_fd(listen_fd_);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (int fd : session_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> threads;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        threads.swap(session_threads_);
    }
    for (auto& t : threads)
        if (t.joinable()) t.join();
}

void BridgeServer::handle_session(int fd) {
    const ControllerParams& cp = config_.params.controller;
    const FollowParams& fp = config_.params.follow;
    const ArenaSpec& arena = config_.params.arena;
    const Scalar dt = config_.params.timebase.dt();

    // Session state. A reset replays this initialization.
    ControllerState state;
    Rng rng(Rng::derive_seed(config_.seed, StreamKeys::kController));
    bool has_last_step = false;
    std::int64_t last_step = 0;
    bool has_prev_fish = false;
    Vec2 prev_fish = Vec2::Zero();
    Scalar derived_heading = 0;
    bool released = false;

    auto reset_session = [&]() {
        state = ControllerState{};
        state.carefulness = cp.carefulness_init;
        rng = Rng(Rng::derive_seed(config_.seed, StreamKeys::kController));
        has_last_step = false;
        has_prev_fish = false;
        derived_heading = 0;
        released = false;
    };
    reset_session();

    nlohmann::json hello = {
        {"hello",
         {{"protocol", kBridgeProtocolVersion},
          {"artifact_version", "0.1.0"},
          {"mode", mode_name(config_.mode.kind)},
          {"law", law_name(config_.law)},
          {"rate_hz", config_.params.timebase.rate}}}};
    if (!send_line(fd, hello)) {
        std::lock_guard<std::mutex> lock(mutex_);
        session_fds_.erase(fd);
        ::close(fd);
        return;
    }

    std::string buffer;
    char chunk[4096];
    bool open = true;
    while (open && !stopping_.load()) {
        const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            break;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));

        std::size_t pos;
        while ((pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;

            ObservationFrame frame;
            try {
                frame = observation_from_json(nlohmann::json::parse(line));
            } catch (const std::exception& e) {
                if (!send_line(fd, {{"error", std::string("parse error: ") + e.what()}})) {
                    open = false;
                    break;
                }
                continue;
            }

            if (has_last_step && frame.step <= last_step) {
                nlohmann::json err = {{"error", "out-of-order step " + std::to_string(frame.step) +
                                                    " (last " + std::to_string(last_step) + ")"},
                                      {"reset", true}};
                reset_session();
                if (!send_line(fd, err)) {
                    open = false;
                    break;
                }
                continue;
            }
            last_step = frame.step;
            has_last_step = true;

            // Release latch: geometry or protocol timeout.
            if (!released &&
                (arena.past_release_plane(frame.fish, config_.protocol.release_margin) ||
                 frame.time_s >= config_.protocol.exit_timeout_s - Scalar(1e-9)))
                released = true;

            Scalar fish_heading;
            if (frame.fish_heading) {
                fish_heading = *frame.fish_heading;
            } else {
                if (has_prev_fish && (frame.fish - prev_fish).norm() > Scalar(1e-9))
                    derived_heading = std::atan2((frame.fish - prev_fish).y(),
                                                 (frame.fish - prev_fish).x());
                fish_heading = derived_heading;
            }

            Observation obs;
            obs.robot = Pose(frame.robot, frame.robot_heading);
            obs.fish = Pose(frame.fish, fish_heading);
            obs.fish_prev = has_prev_fish ? prev_fish : frame.fish;
            obs.fish_released = released;
            prev_fish = frame.fish;
            has_prev_fish = true;

            CommandFrame reply;
            try {
                const MotionCommand cmd =
                    controller_step(state, obs, dt, config_.mode, config_.law, cp, fp, arena, rng);
                reply.target = cmd.target;
                reply.speed_factor = cmd.speed_factor;
            } catch (const std::exception& e) {
                if (!send_line(fd, {{"error", std::string("controller error: ") + e.what()}})) {
                    open = false;
                }
                continue;
            }
            reply.step = frame.step;
            reply.phase = state.phase;
            reply.carefulness = state.carefulness;
            if (!send_line(fd, command_to_json(reply))) {
                open = false;
                break;
            }
        }
    }

    std::lock_guard<std::mutex> lock(mutex_);
    session_fds_.erase(fd);
    ::close(fd);
}

BridgeClient::BridgeClient(const std::string& host, std::uint16_t port, int connect_timeout_ms) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw std::runtime_error("bridge client: socket() failed");

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        close_fd(fd_);
        throw std::runtime_error("bridge client: bad host '" + host + "' (use a dotted IPv4 address)");
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        const std::string msg = std::strerror(errno);
        close_fd(fd_);
        throw std::runtime_error("bridge client: connect to " + host + ":" + std::to_string(port) +
                                 " failed: " + msg);
    }
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

    hello_ = nlohmann::json::parse(read_line(connect_timeout_ms));
    if (!hello_.contains("hello") ||
        hello_["hello"].value("protocol", -1) != kBridgeProtocolVersion)
        throw std::runtime_error("bridge client: unexpected hello: " + hello_.dump());
}

BridgeClient::~BridgeClient() { close_fd(fd_); }

std::string BridgeClient::read_line(int timeout_ms) {
    while (true) {
        const auto pos = buffer_.find('\n');
        if (pos != std::string::npos) {
            std::string line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            return line;
        }
        pollfd pfd{fd_, POLLIN, 0};
        const int pr = ::poll(&pfd, 1, timeout_ms);
        if (pr == 0) throw std::runtime_error("bridge client: reply timeout");
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error("bridge client: poll failed");
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n == 0) throw std::runtime_error("bridge client: connection closed");
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error("bridge client: recv failed");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::string BridgeClient::round_trip(const std::string& line, int timeout_ms) {
    if (!send_all(fd_, line + "\n"))
        throw std::runtime_error("bridge client: send failed");
    return read_line(timeout_ms);
}

CommandFrame BridgeClient::step(const ObservationFrame& frame, int timeout_ms) {
    const std::string reply = round_trip(observation_to_json(frame).dump(), timeout_ms);
    const nlohmann::json j = nlohmann::json::parse(reply);
    if (j.contains("error"))
        throw std::runtime_error("bridge client: server error: " + j["error"].get<std::string>());
    return command_from_json(j);
}

RemoteControllerDriver::RemoteControllerDriver(BridgeClient& client, const ParamSet& params)
    : client_(client), params_(params) {}

ControlFrame RemoteControllerDriver::step(const Observation& obs, Scalar dt) {
    ObservationFrame frame;
    frame.step = next_step_;
    frame.time_s = static_cast<Scalar>(next_step_) * dt;
    frame.fish = obs.fish.position;
    frame.fish_heading = obs.fish.heading;
    frame.robot = obs.robot.position;
    frame.robot_heading = obs.robot.heading;
    ++next_step_;

    const CommandFrame reply = client_.step(frame);

    // Mirror the server's score bookkeeping so records carry full columns.
    if (reply.phase != Phase::Milling) {
        const Vec2 robot_ref = has_prev_robot_ ? prev_robot_pos_ : obs.robot.position;
        Scalar d = 0;
        if ((robot_ref - obs.fish_prev).norm() > Scalar(0))
            d = approach_distance(robot_ref, obs.fish_prev, obs.fish.position, dt);
        const bool in_zone = (obs.fish.position - obs.robot.position).norm() <=
                             params_.controller.interaction_zone;
        scores_.update(d, in_zone, params_.controller, params_.follow);
    }
    prev_robot_pos_ = obs.robot.position;
    has_prev_robot_ = true;
    if (reply.phase == Phase::Approach && last_phase_ != Phase::Approach) ++approach_index_;
    last_phase_ = reply.phase;

    ControlFrame out;
    out.command = {reply.target, reply.speed_factor};
    out.phase = reply.phase;
    out.carefulness = reply.carefulness;
    out.avoid_score = scores_.avoid;
    out.follow_score = scores_.follow;
    out.approach_index = approach_index_;
    return out;
}

}  // namespace leadsim
