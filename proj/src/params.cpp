#include "leadsim/params.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace leadsim {

using json = nlohmann::json;

ReferenceDistribution pretrial_reference_distribution() {
    ReferenceDistribution ref;
    ref.frequencies = {0.112739, 0.031610, 0.034126, 0.042342, 0.069718,
                       0.080316, 0.065151, 0.108997, 0.126346, 0.328655};
    return ref;
}

namespace {

template <typename Struct, typename FieldMap>
void read_fields(const json& j, const char* section, Struct& out, const FieldMap& fields) {
    if (!j.contains(section)) return;
    const json& sec = j.at(section);
    if (!sec.is_object())
        throw std::invalid_argument(std::string("params: section '") + section + "' must be an object");
    for (const auto& [key, value] : sec.items()) {
        bool known = false;
        for (const auto& [name, ptr] : fields) {
            if (key == name) {
                value.get_to(out.*ptr);
                known = true;
                break;
            }
        }
        if (!known)
            throw std::invalid_argument(std::string("params: unknown key '") + section + "." + key + "'");
    }
}

constexpr std::pair<const char*, Scalar ControllerParams::*> kControllerFields[] = {
    {"speed_clip_lo", &ControllerParams::speed_clip_lo},
    {"speed_clip_hi", &ControllerParams::speed_clip_hi},
    {"interaction_zone", &ControllerParams::interaction_zone},
    {"avoid_smoothing", &ControllerParams::avoid_smoothing},
    {"avoid_gain", &ControllerParams::avoid_gain},
    {"avoid_baseline", &ControllerParams::avoid_baseline},
    {"carefulness_rate", &ControllerParams::carefulness_rate},
    {"carefulness_init", &ControllerParams::carefulness_init},
    {"approach_offset", &ControllerParams::approach_offset},
    {"comfort_dist", &ControllerParams::comfort_dist},
    {"close_dist", &ControllerParams::close_dist},
    {"comfort_dwell_s", &ControllerParams::comfort_dwell_s},
    {"lead_follow_dist", &ControllerParams::lead_follow_dist},
    {"lead_apart_tolerance_s", &ControllerParams::lead_apart_tolerance_s},
    {"lead_burst_dist", &ControllerParams::lead_burst_dist},
    {"corner_arrival_dist", &ControllerParams::corner_arrival_dist},
    {"base_speed_factor", &ControllerParams::base_speed_factor},
    {"speed_unit", &ControllerParams::speed_unit},
    {"max_speed", &ControllerParams::max_speed},
    {"lead_speed_factor", &ControllerParams::lead_speed_factor},
    {"milling_diameter", &ControllerParams::milling_diameter},
    {"milling_speed", &ControllerParams::milling_speed},
    {"milling_door_offset", &ControllerParams::milling_door_offset},
};

constexpr std::pair<const char*, Scalar RobotMotionParams::*> kMotionFields[] = {
    {"max_turn_rate", &RobotMotionParams::max_turn_rate},
    {"accel", &RobotMotionParams::accel},
    {"decel", &RobotMotionParams::decel},
    {"arrival_radius", &RobotMotionParams::arrival_radius},
    {"drive_gate_angle", &RobotMotionParams::drive_gate_angle},
};

constexpr std::pair<const char*, Scalar ArenaSpec::*> kArenaFields[] = {
    {"side", &ArenaSpec::side},
    {"corner_inset", &ArenaSpec::corner_inset},
    {"startbox_side", &ArenaSpec::startbox_side},
    {"startbox_door_width", &ArenaSpec::startbox_door_width},
};

json controller_to_json(const ControllerParams& c) {
    json j;
    for (const auto& [name, ptr] : kControllerFields) j[name] = c.*ptr;
    return j;
}

json follow_to_json(const FollowParams& f) {
    return json{{"follow_smoothing", f.follow_smoothing},
                {"follow_gain", f.follow_gain},
                {"follow_init", f.follow_init},
                {"episode_threshold", f.episode_threshold},
                {"episode_min_steps", f.episode_min_steps},
                {"episode_max_gap_steps", f.episode_max_gap_steps}};
}

void follow_from_json(const json& j, FollowParams& f) {
    if (!j.contains("follow")) return;
    const json& sec = j.at("follow");
    for (const auto& [key, value] : sec.items()) {
        if (key == "follow_smoothing") value.get_to(f.follow_smoothing);
        else if (key == "follow_gain") value.get_to(f.follow_gain);
        else if (key == "follow_init") value.get_to(f.follow_init);
        else if (key == "episode_threshold") value.get_to(f.episode_threshold);
        else if (key == "episode_min_steps") value.get_to(f.episode_min_steps);
        else if (key == "episode_max_gap_steps") value.get_to(f.episode_max_gap_steps);
        else throw std::invalid_argument("params: unknown key 'follow." + key + "'");
    }
}

json motion_to_json(const RobotMotionParams& m) {
    json j;
    for (const auto& [name, ptr] : kMotionFields) j[name] = m.*ptr;
    return j;
}

json arena_to_json(const ArenaSpec& a) {
    json j;
    for (const auto& [name, ptr] : kArenaFields) j[name] = a.*ptr;
    return j;
}

json paramset_to_json(const ParamSet& p) {
    return json{{"controller", controller_to_json(p.controller)},
                {"follow", follow_to_json(p.follow)},
                {"motion", motion_to_json(p.motion)},
                {"arena", arena_to_json(p.arena)},
                {"timebase", json{{"rate", p.timebase.rate}}}};
}

}  // namespace

std::string params_to_json(const ParamSet& params) {
    return paramset_to_json(params).dump(2) + "\n";
}

ParamSet params_from_json(const std::string& text) {
    json j = json::parse(text);
    ParamSet p;
    read_fields(j, "controller", p.controller, kControllerFields);
    follow_from_json(j, p.follow);
    read_fields(j, "motion", p.motion, kMotionFields);
    read_fields(j, "arena", p.arena, kArenaFields);
    if (j.contains("timebase")) {
        const json& tb = j.at("timebase");
        if (tb.contains("rate")) tb.at("rate").get_to(p.timebase.rate);
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "controller" && key != "follow" && key != "motion" && key != "arena" &&
            key != "timebase")
            throw std::invalid_argument("params: unknown section '" + key + "'");
    }
    p.validate();
    return p;
}

ParamSet load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return params_from_json(buf.str());
}

void save_params_file(const ParamSet& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write params file: " + path);
    out << params_to_json(params);
}

std::string params_hash(const ParamSet& params) {
    const std::string text = paramset_to_json(params).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a:") + buf;
}

}  // namespace leadsim
