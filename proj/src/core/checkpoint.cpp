#include "checkpoint.hpp"

#include "error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace wavecast {

namespace {

using nlohmann::ordered_json;

const char* format_tag = "wavecast-checkpoint";

const char* activation_name(FinalActivation a) { return a == FinalActivation::Relu ? "relu" : "linear"; }

FinalActivation parse_activation(const std::string& s)
{
    if (s == "relu") return FinalActivation::Relu;
    if (s == "linear") return FinalActivation::Linear;
    fail(ErrorKind::Format, "unknown final_activation '" + s + "'");
}

ordered_json config_json(const NetworkConfig& c)
{
    return {{"layers", c.layers},
            {"taps", c.taps},
            {"channels", c.channels},
            {"num_conditions", c.num_conditions},
            {"final_activation", activation_name(c.final_activation)}};
}

ordered_json meta_json(const CheckpointMeta& m)
{
    ordered_json out = {{"target", m.target_name}, {"conditions", m.condition_names}};
    if (m.norm) {
        out["normalization"] = {{"mu", m.norm->mu}, {"sigma", m.norm->sigma}};
    } else {
        out["normalization"] = nullptr;
    }
    out["seed"] = m.seed;
    out["train_mae"] = m.train_mae;
    out["train_begin"] = m.train_begin;
    out["train_end"] = m.train_end;
    return out;
}

template <typename T>
T field(const ordered_json& obj, const char* name, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(name)) {
        fail(ErrorKind::Format, where + ": missing field '" + name + "'");
    }
    try {
        return obj.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorKind::Format, where + ": field '" + name + "' has the wrong type");
    }
}

NetworkConfig parse_config(const ordered_json& obj)
{
    NetworkConfig c;
    c.layers = field<std::size_t>(obj, "layers", "config");
    c.taps = field<std::size_t>(obj, "taps", "config");
    c.channels = field<std::vector<std::size_t>>(obj, "channels", "config");
    c.num_conditions = field<std::size_t>(obj, "num_conditions", "config");
    c.final_activation = parse_activation(field<std::string>(obj, "final_activation", "config"));
    try {
        validate(c);
    } catch (const Error& e) {
        fail(ErrorKind::Format, std::string("stored config is invalid: ") + e.what());
    }
    return c;
}

CheckpointMeta parse_meta(const ordered_json& obj)
{
    CheckpointMeta m;
    m.target_name = field<std::string>(obj, "target", "metadata");
    m.condition_names = field<std::vector<std::string>>(obj, "conditions", "metadata");
    if (obj.contains("normalization") && !obj["normalization"].is_null()) {
        const auto& n = obj["normalization"];
        m.norm = NormStats{field<double>(n, "mu", "normalization"), field<double>(n, "sigma", "normalization")};
    }
    m.seed = field<std::uint64_t>(obj, "seed", "metadata");
    m.train_mae = field<double>(obj, "train_mae", "metadata");
    m.train_begin = field<std::size_t>(obj, "train_begin", "metadata");
    m.train_end = field<std::size_t>(obj, "train_end", "metadata");
    return m;
}

NetworkParams parse_filters(const ordered_json& arr, const NetworkConfig& config)
{
    if (!arr.is_array()) {
        fail(ErrorKind::Format, "'filters' must be an array");
    }
    NetworkParams params = make_params(config);
    std::size_t count = 0;
    for_each_filter(params, [&](const std::string&, ParamKey, ConvFilter&) { ++count; });
    if (arr.size() != count) {
        fail(ErrorKind::Format, "checkpoint holds " + std::to_string(arr.size()) + " filters, its config implies " +
                                   std::to_string(count));
    }
    std::size_t i = 0;
    for_each_filter(params, [&](const std::string& name, ParamKey, ConvFilter& f) {
        const auto& obj = arr[i++];
        const std::string where = "filter " + std::to_string(i - 1);
        const auto got = field<std::string>(obj, "name", where);
        if (got != name) {
            fail(ErrorKind::Format, where + " is '" + got + "', expected '" + name + "'");
        }
        const auto taps = field<std::size_t>(obj, "taps", name);
        const auto in = field<std::size_t>(obj, "in_channels", name);
        const auto out = field<std::size_t>(obj, "out_channels", name);
        const auto dilation = field<std::size_t>(obj, "dilation", name);
        if (taps != f.taps || in != f.in_channels || out != f.out_channels || dilation != f.dilation) {
            fail(ErrorKind::Format, name + " has shape taps=" + std::to_string(taps) + " in=" + std::to_string(in) +
                                        " out=" + std::to_string(out) + " dilation=" + std::to_string(dilation) +
                                        ", config implies taps=" + std::to_string(f.taps) + " in=" +
                                        std::to_string(f.in_channels) + " out=" + std::to_string(f.out_channels) +
                                        " dilation=" + std::to_string(f.dilation));
        }
        f.weights = field<std::vector<double>>(obj, "weights", name);
        f.bias = field<std::vector<double>>(obj, "bias", name);
        try {
            f.validate();
        } catch (const Error& e) {
            fail(ErrorKind::Format, name + ": " + e.what());
        }
    });
    return params;
}

ARModel parse_ar(const ordered_json& obj)
{
    ARModel m;
    m.order = field<std::size_t>(obj, "order", "ar");
    m.num_features = field<std::size_t>(obj, "num_features", "ar");
    m.coefficients = field<std::vector<std::vector<double>>>(obj, "coefficients", "ar");
    require(m.order >= 1 && m.num_features >= 1, ErrorKind::Format, "ar: order and num_features must be positive");
    require(m.coefficients.size() == m.num_features, ErrorKind::Format, "ar: one coefficient row per feature expected");
    for (const auto& row : m.coefficients) {
        require(row.size() == m.num_features * m.order + 1, ErrorKind::Format,
                "ar: coefficient row of length " + std::to_string(row.size()) + ", expected " +
                    std::to_string(m.num_features * m.order + 1));
    }
    return m;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open checkpoint " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

std::string checkpoint_to_json(const Checkpoint& c)
{
    ordered_json doc;
    doc["format"] = format_tag;
    doc["format_version"] = checkpoint_format_version;
    if (c.kind == ModelKind::WaveNet) {
        check_compatible(c.params, c.network);
        doc["kind"] = "wavenet";
        doc["config"] = config_json(c.network);
    } else {
        doc["kind"] = "ar";
        doc["ar"] = {{"order", c.ar.order}, {"num_features", c.ar.num_features}, {"coefficients", c.ar.coefficients}};
    }
    doc["metadata"] = meta_json(c.meta);
    if (c.kind == ModelKind::WaveNet) {
        ordered_json filters = ordered_json::array();
        for_each_filter(c.params, [&](const std::string& name, ParamKey, const ConvFilter& f) {
            filters.push_back({{"name", name},
                               {"taps", f.taps},
                               {"in_channels", f.in_channels},
                               {"out_channels", f.out_channels},
                               {"dilation", f.dilation},
                               {"weights", f.weights},
                               {"bias", f.bias}});
        });
        doc["filters"] = std::move(filters);
    }
    return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text)
{
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, std::string("checkpoint is not valid JSON: ") + e.what());
    }
    if (field<std::string>(doc, "format", "checkpoint") != format_tag) {
        fail(ErrorKind::Format, "not a wavecast checkpoint");
    }
    const int version = field<int>(doc, "format_version", "checkpoint");
    if (version != checkpoint_format_version) {
        fail(ErrorKind::Format, "unsupported checkpoint format_version " + std::to_string(version));
    }
    Checkpoint c;
    const auto kind = field<std::string>(doc, "kind", "checkpoint");
    if (kind == "wavenet") {
        c.kind = ModelKind::WaveNet;
        c.network = parse_config(field<ordered_json>(doc, "config", "checkpoint"));
        c.params = parse_filters(field<ordered_json>(doc, "filters", "checkpoint"), c.network);
    } else if (kind == "ar") {
        c.kind = ModelKind::AutoRegressive;
        c.ar = parse_ar(field<ordered_json>(doc, "ar", "checkpoint"));
    } else {
        fail(ErrorKind::Format, "unknown model kind '" + kind + "'");
    }
    c.meta = parse_meta(field<ordered_json>(doc, "metadata", "checkpoint"));
    if (c.kind == ModelKind::WaveNet && c.meta.condition_names.size() != c.network.num_conditions) {
        fail(ErrorKind::Format, "metadata names " + std::to_string(c.meta.condition_names.size()) +
                                   " conditions, config has " + std::to_string(c.network.num_conditions));
    }
    return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path)
{
    const std::string text = checkpoint_to_json(checkpoint);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write checkpoint " + path);
    out << text;
    out.flush();
    require(static_cast<bool>(out), ErrorKind::Io, "failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path)
{
    try {
        return checkpoint_from_json(read_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Format) {
            fail(ErrorKind::Format, path + ": " + e.what());
        }
        throw;
    }
}

std::string config_diff(const NetworkConfig& expected, const NetworkConfig& actual)
{
    auto list = [](const std::vector<std::size_t>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? "," : "") + std::to_string(v[i]);
        }
        return s + "]";
    };
    std::string out;
    auto line = [&](const char* name, const std::string& a, const std::string& b) {
        if (a != b) out += std::string(name) + ": " + a + " vs " + b + "\n";
    };
    line("layers", std::to_string(expected.layers), std::to_string(actual.layers));
    line("taps", std::to_string(expected.taps), std::to_string(actual.taps));
    line("channels", list(expected.channels), list(actual.channels));
    line("num_conditions", std::to_string(expected.num_conditions), std::to_string(actual.num_conditions));
    line("final_activation", activation_name(expected.final_activation), activation_name(actual.final_activation));
    return out;
}

void require_network(const Checkpoint& checkpoint, const NetworkConfig& expected)
{
    require(checkpoint.kind == ModelKind::WaveNet, ErrorKind::Format, "checkpoint does not hold a network");
    const std::string diff = config_diff(expected, checkpoint.network);
    if (!diff.empty()) {
        fail(ErrorKind::Format, "checkpoint config differs (expected vs stored):\n" + diff);
    }
}

void save_params(const NetworkParams& params, const NetworkConfig& config, const std::string& path)
{
    Checkpoint c;
    c.network = config;
    c.params = params;
    c.meta.condition_names.resize(config.num_conditions);
    save_checkpoint(c, path);
}

std::pair<NetworkParams, NetworkConfig> load_params(const std::string& path, const std::optional<NetworkConfig>& expected)
{
    Checkpoint c = load_checkpoint(path);
    if (expected) {
        require_network(c, *expected);
    }
    require(c.kind == ModelKind::WaveNet, ErrorKind::Format, path + " does not hold a network");
    return {std::move(c.params), c.network};
}

} // namespace wavecast
