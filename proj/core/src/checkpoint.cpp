#include "aor/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "aor/errors.hpp"

namespace aor {

namespace {

using nlohmann::json;

void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64_le(std::string& out, double d) {
    put_u64_le(out, std::bit_cast<std::uint64_t>(d));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

double get_f64_le(const unsigned char* p) {
    return std::bit_cast<double>(get_u64_le(p));
}

json config_to_json(const SplitModelConfig& config) {
    return json{{"input_dim", config.input_dim},
                {"trunk_widths", config.trunk_widths},
                {"head_task_widths", config.head_task_widths},
                {"head_attr_widths", config.head_attr_widths},
                {"seed", config.seed}};
}

SplitModelConfig config_from_json(const json& j) {
    SplitModelConfig config;
    config.input_dim = j.at("input_dim").get<std::size_t>();
    config.trunk_widths = j.at("trunk_widths").get<std::vector<std::size_t>>();
    config.head_task_widths = j.at("head_task_widths").get<std::vector<std::size_t>>();
    config.head_attr_widths = j.at("head_attr_widths").get<std::vector<std::size_t>>();
    config.seed = j.at("seed").get<std::uint64_t>();
    return config;
}

} // namespace

void save_checkpoint(const SplitModel& model, const std::string& path) {
    json params = json::array();
    const auto plist = model.parameters();
    for (const Parameter* p : plist) {
        params.push_back(json{{"name", p->name},
                              {"rows", p->value.rows},
                              {"cols", p->value.cols},
                              {"trainable", p->trainable}});
    }
    const json header = {{"config", config_to_json(model.config)},
                         {"params", params},
                         {"seed", model.config.seed},
                         {"stage", model.stage_tag}};
    const std::string header_str = header.dump();

    std::string out;
    out.append(kCheckpointMagic, 4);
    put_u32_le(out, kCheckpointVersion);
    put_u64_le(out, header_str.size());
    out += header_str;
    for (const Parameter* p : plist) {
        for (double d : p->value.data) put_f64_le(out, d);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("short write to checkpoint: " + path);
}

SplitModel load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 16) {
        throw CheckpointError(CheckpointError::Kind::Truncated,
                              "checkpoint shorter than the fixed 16-byte prefix: " + path);
    }
    if (std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
        throw CheckpointError(CheckpointError::Kind::BadMagic, "bad magic in " + path);
    }
    const std::uint32_t version = get_u32_le(bytes.data() + 4);
    if (version != kCheckpointVersion) {
        throw CheckpointError(CheckpointError::Kind::BadVersion,
                              "unsupported checkpoint version " + std::to_string(version) +
                                  " in " + path);
    }
    const std::uint64_t header_len = get_u64_le(bytes.data() + 8);
    if (bytes.size() < 16 + header_len) {
        throw CheckpointError(CheckpointError::Kind::Truncated,
                              "checkpoint header truncated: " + path);
    }

    json header;
    try {
        header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + header_len);
    } catch (const json::exception& e) {
        throw CheckpointError(CheckpointError::Kind::BadHeader,
                              std::string("invalid checkpoint header JSON: ") + e.what());
    }

    SplitModel model;
    std::vector<std::string> names;
    std::vector<std::size_t> rows, cols;
    std::vector<bool> trainable;
    std::uint64_t payload_doubles = 0;
    try {
        model = build_split_model(config_from_json(header.at("config")));
        model.stage_tag = header.at("stage").get<std::string>();
        for (const auto& pj : header.at("params")) {
            names.push_back(pj.at("name").get<std::string>());
            rows.push_back(pj.at("rows").get<std::size_t>());
            cols.push_back(pj.at("cols").get<std::size_t>());
            trainable.push_back(pj.at("trainable").get<bool>());
            payload_doubles += rows.back() * cols.back();
        }
    } catch (const json::exception& e) {
        throw CheckpointError(CheckpointError::Kind::BadHeader,
                              std::string("checkpoint header missing fields: ") + e.what());
    } catch (const ConfigError& e) {
        throw CheckpointError(CheckpointError::Kind::BadHeader,
                              std::string("checkpoint config invalid: ") + e.what());
    }

    auto plist = model.parameters();
    if (plist.size() != names.size()) {
        throw CheckpointError(CheckpointError::Kind::ShapeMismatch,
                              "checkpoint declares " + std::to_string(names.size()) +
                                  " parameters, config builds " + std::to_string(plist.size()));
    }
    const std::size_t expected = 16 + header_len + payload_doubles * 8;
    if (bytes.size() < expected) {
        throw CheckpointError(CheckpointError::Kind::Truncated,
                              "checkpoint payload truncated: have " +
                                  std::to_string(bytes.size()) + " bytes, need " +
                                  std::to_string(expected));
    }
    if (bytes.size() > expected) {
        throw CheckpointError(CheckpointError::Kind::ShapeMismatch,
                              "checkpoint payload longer than the declared shapes");
    }

    const unsigned char* cursor = bytes.data() + 16 + header_len;
    for (std::size_t i = 0; i < plist.size(); ++i) {
        Parameter* p = plist[i];
        if (p->name != names[i] || p->value.rows != rows[i] || p->value.cols != cols[i]) {
            throw CheckpointError(CheckpointError::Kind::ShapeMismatch,
                                  "parameter " + std::to_string(i) + " is " + names[i] + " " +
                                      std::to_string(rows[i]) + "x" + std::to_string(cols[i]) +
                                      " in the header but " + p->name + " " +
                                      shape_str(p->value) + " in the rebuilt model");
        }
        for (auto& d : p->value.data) {
            d = get_f64_le(cursor);
            cursor += 8;
        }
        p->trainable = trainable[i];
        p->grad.fill(0.0);
    }
    return model;
}

} // namespace aor
