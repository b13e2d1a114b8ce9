#include "leadsim/record.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "leadsim/detail/csv.hpp"

namespace leadsim {

nlohmann::json TrialManifest::to_json() const {
    return {{"artifact_version", artifact_version},
            {"seed", seed},
            {"params_hash", params_hash},
            {"rate_hz", rate_hz},
            {"pre_release_steps", pre_release_steps},
            {"config", config},
            {"warnings", warnings}};
}

TrialManifest TrialManifest::from_json(const nlohmann::json& j) {
    TrialManifest m;
    m.artifact_version = j.value("artifact_version", std::string("unknown"));
    m.seed = j.value("seed", std::uint64_t(0));
    m.params_hash = j.value("params_hash", std::string());
    m.rate_hz = j.value("rate_hz", Scalar(25));
    m.pre_release_steps = j.value("pre_release_steps", std::int64_t(0));
    if (j.contains("config")) m.config = j.at("config");
    if (j.contains("warnings")) m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
}

std::size_t TrialRecord::post_release_begin() const {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].phase != Phase::Milling) return i;
    return rows.size();
}

std::string manifest_path_for(const std::string& csv_path) {
    const auto dot = csv_path.rfind(".csv");
    if (dot != std::string::npos && dot == csv_path.size() - 4)
        return csv_path.substr(0, dot) + ".manifest.json";
    return csv_path + ".manifest.json";
}

namespace {

constexpr const char* kHeader =
    "step,time_s,fish_x,fish_y,robot_x,robot_y,phase,carefulness,avoid_score,follow_score,"
    "robot_speed,fish_speed,approach_idx";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

Scalar parse_number(const std::string& field, std::size_t line_no, const std::string& column) {
    Scalar value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": bad number '" + field + "' in column " + column);
    return value;
}

/// Linear interpolation of a record onto a fixed-rate grid. Continuous
/// columns are interpolated; phase and approach_idx come from the sample at
/// or before each grid time.
std::vector<TrialRow> resample_rows(const std::vector<TrialRow>& rows, Scalar target_rate_hz) {
    const Scalar dt = Scalar(1) / target_rate_hz;
    const Scalar t0 = rows.front().time_s;
    const Scalar t_end = rows.back().time_s;
    std::vector<TrialRow> out;
    std::size_t hi = 1;
    for (std::int64_t k = 0;; ++k) {
        const Scalar t = t0 + static_cast<Scalar>(k) * dt;
        if (t > t_end + Scalar(1e-9)) break;
        while (hi < rows.size() && rows[hi].time_s < t - Scalar(1e-12)) ++hi;
        const std::size_t j = std::min(hi, rows.size() - 1);
        const TrialRow& b = rows[j];
        const TrialRow& a = rows[j > 0 ? j - 1 : 0];
        const Scalar span = b.time_s - a.time_s;
        const Scalar w = span > 0 ? std::clamp((t - a.time_s) / span, Scalar(0), Scalar(1))
                                  : Scalar(0);
        TrialRow r;
        r.step = k;
        r.time_s = t;
        r.fish = (1 - w) * a.fish + w * b.fish;
        r.robot = (1 - w) * a.robot + w * b.robot;
        r.carefulness = (1 - w) * a.carefulness + w * b.carefulness;
        r.avoid_score = (1 - w) * a.avoid_score + w * b.avoid_score;
        r.follow_score = (1 - w) * a.follow_score + w * b.follow_score;
        r.robot_speed = (1 - w) * a.robot_speed + w * b.robot_speed;
        r.fish_speed = (1 - w) * a.fish_speed + w * b.fish_speed;
        const TrialRow& left = w < 1 ? a : b;
        r.phase = left.phase;
        r.approach_idx = left.approach_idx;
        out.push_back(r);
    }
    return out;
}

}  // namespace

void write_record(const TrialRecord& record, const std::string& csv_path) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write record file '" + csv_path + "'");
    std::string buf;
    buf.reserve(1 << 20);
    buf += kHeader;
    buf += '\n';
    for (const auto& r : record.rows) {
        detail::append_int(buf, r.step);
        buf += ',';
        detail::append_fixed(buf, r.time_s);
        buf += ',';
        detail::append_fixed(buf, r.fish.x());
        buf += ',';
        detail::append_fixed(buf, r.fish.y());
        buf += ',';
        detail::append_fixed(buf, r.robot.x());
        buf += ',';
        detail::append_fixed(buf, r.robot.y());
        buf += ',';
        buf += phase_char(r.phase);
        buf += ',';
        detail::append_fixed(buf, r.carefulness);
        buf += ',';
        detail::append_fixed(buf, r.avoid_score);
        buf += ',';
        detail::append_fixed(buf, r.follow_score);
        buf += ',';
        detail::append_fixed(buf, r.robot_speed);
        buf += ',';
        detail::append_fixed(buf, r.fish_speed);
        buf += ',';
        detail::append_int(buf, r.approach_idx);
        buf += '\n';
        if (buf.size() > (1 << 20)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed for record file '" + csv_path + "'");

    std::ofstream mout(manifest_path_for(csv_path), std::ios::binary);
    if (!mout) throw std::runtime_error("cannot write manifest for '" + csv_path + "'");
    mout << record.manifest.to_json().dump(2) << '\n';
}

TrialRecord read_record(const std::string& csv_path, Scalar target_rate_hz,
                        bool allow_resample) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open record file '" + csv_path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("record file '" + csv_path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) -> int {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    const int c_step = column("step"), c_time = column("time_s");
    const int c_fx = column("fish_x"), c_fy = column("fish_y");
    const int c_rx = column("robot_x"), c_ry = column("robot_y");
    for (const auto& [name, idx] : {std::pair<const char*, int>{"step", c_step},
                                    {"time_s", c_time},
                                    {"fish_x", c_fx},
                                    {"fish_y", c_fy},
                                    {"robot_x", c_rx},
                                    {"robot_y", c_ry}})
        if (idx < 0)
            throw std::runtime_error("record file '" + csv_path + "' lacks required column '" +
                                     std::string(name) + "'");
    const int c_phase = column("phase"), c_care = column("carefulness");
    const int c_avoid = column("avoid_score"), c_follow = column("follow_score");
    const int c_rs = column("robot_speed"), c_fs = column("fish_speed");
    const int c_ai = column("approach_idx");

    TrialRecord record;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        auto num = [&](int idx, const char* name) {
            return parse_number(fields[static_cast<std::size_t>(idx)], line_no, name);
        };
        TrialRow r;
        r.step = static_cast<std::int64_t>(num(c_step, "step"));
        r.time_s = num(c_time, "time_s");
        r.fish = Vec2(num(c_fx, "fish_x"), num(c_fy, "fish_y"));
        r.robot = Vec2(num(c_rx, "robot_x"), num(c_ry, "robot_y"));
        if (c_phase >= 0) {
            const auto& f = fields[static_cast<std::size_t>(c_phase)];
            if (f.size() != 1)
                throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                         ": bad phase '" + f + "'");
            try {
                r.phase = phase_from_char(f[0]);
            } catch (const std::invalid_argument& e) {
                throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": " +
                                         e.what());
            }
        } else {
            r.phase = Phase::Approach;
        }
        if (c_care >= 0) r.carefulness = num(c_care, "carefulness");
        if (c_avoid >= 0) r.avoid_score = num(c_avoid, "avoid_score");
        if (c_follow >= 0) r.follow_score = num(c_follow, "follow_score");
        if (c_rs >= 0) r.robot_speed = num(c_rs, "robot_speed");
        if (c_fs >= 0) r.fish_speed = num(c_fs, "fish_speed");
        if (c_ai >= 0) r.approach_idx = static_cast<int>(num(c_ai, "approach_idx"));
        record.rows.push_back(r);
    }
    if (record.rows.empty())
        throw std::runtime_error("record file '" + csv_path + "' has no data rows");

    // Detect the native sample rate from the median time delta.
    if (record.rows.size() >= 2) {
        std::vector<Scalar> deltas;
        deltas.reserve(record.rows.size() - 1);
        for (std::size_t i = 1; i < record.rows.size(); ++i)
            deltas.push_back(record.rows[i].time_s - record.rows[i - 1].time_s);
        std::nth_element(deltas.begin(), deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2),
                         deltas.end());
        const Scalar median_dt = deltas[deltas.size() / 2];
        if (median_dt <= 0)
            throw std::runtime_error("record file '" + csv_path + "' has non-increasing time column");
        const Scalar native_rate = Scalar(1) / median_dt;
        if (std::abs(native_rate - target_rate_hz) > Scalar(1e-6)) {
            if (!allow_resample)
                throw std::runtime_error("record file '" + csv_path + "' is sampled at " +
                                         std::to_string(native_rate) + " Hz, expected " +
                                         std::to_string(target_rate_hz) +
                                         " Hz (pass the resample option to convert)");
            record.rows = resample_rows(record.rows, target_rate_hz);
        }
    }

    const std::string mpath = manifest_path_for(csv_path);
    std::ifstream min(mpath);
    if (min) {
        nlohmann::json j;
        try {
            min >> j;
            record.manifest = TrialManifest::from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("manifest file '" + mpath + "': " + e.what());
        }
    }
    record.manifest.rate_hz = target_rate_hz;
    return record;
}

}  // namespace leadsim
