// config.cpp

#include "umil/config.hpp"

#include <fstream>

#include <json.hpp>

using nlohmann::json;

namespace umil {

namespace {

DivisionStrategy parse_strategy(const std::string& s) {
    if (s == "historical_variance") return DivisionStrategy::historical_variance;
    if (s == "max_confidence") return DivisionStrategy::max_confidence;
    throw ConfigError("unknown division_strategy '" + s + "'");
}

LabelMode parse_label_mode(const std::string& s) {
    if (s == "rounded_mean") return LabelMode::rounded_mean;
    if (s == "video_label") return LabelMode::video_label;
    throw ConfigError("unknown label_mode '" + s + "'");
}

CSupervisionMode parse_c_supervision(const std::string& s) {
    if (s == "video_max") return CSupervisionMode::video_max;
    if (s == "per_snippet") return CSupervisionMode::per_snippet;
    throw ConfigError("unknown c_supervision '" + s + "'");
}

ScoringScheme parse_scheme_str(const std::string& s) {
    if (s == "avg_prediction") return ScoringScheme::avg_prediction;
    if (s == "avg_feature") return ScoringScheme::avg_feature;
    throw ConfigError("unknown scoring_scheme '" + s + "'");
}

}  // namespace

ConfigFile parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ConfigFile cfg;
    RunConfig& r = cfg.run;
    GeneratorConfig& g = cfg.gen;

    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "seed") { r.seed = val.get<std::uint64_t>(); g.seed = r.seed; }
            else if (key == "batch_size") r.batch_size = val.get<std::size_t>();
            else if (key == "epochs_mil") r.epochs_mil = val.get<std::size_t>();
            else if (key == "epochs_umil") r.epochs_umil = val.get<std::size_t>();
            else if (key == "lr_base") r.optimizer.lr_base = val.get<double>();
            else if (key == "beta1") r.optimizer.beta1 = val.get<double>();
            else if (key == "beta2") r.optimizer.beta2 = val.get<double>();
            else if (key == "adam_eps") r.optimizer.eps = val.get<double>();
            else if (key == "weight_decay") r.optimizer.weight_decay = val.get<double>();
            else if (key == "warmup_epochs") r.optimizer.warmup_epochs = val.get<std::size_t>();
            else if (key == "alpha") r.weights.alpha = val.get<double>();
            else if (key == "beta") r.weights.beta = val.get<double>();
            else if (key == "lambda_st") r.weights.lambda_st = val.get<double>();
            else if (key == "entropy_weight") r.weights.entropy_weight = val.get<double>();
            else if (key == "tau") r.weights.tau = val.get<double>();
            else if (key == "delta") r.weights.delta = val.get<double>();
            else if (key == "aug_sigma") r.weights.aug_sigma = val.get<double>();
            else if (key == "confident_fraction")
                r.division.confident_fraction = val.get<double>();
            else if (key == "division_strategy")
                r.division.strategy = parse_strategy(val.get<std::string>());
            else if (key == "label_mode")
                r.division.label_mode = parse_label_mode(val.get<std::string>());
            else if (key == "c_supervision")
                r.c_supervision = parse_c_supervision(val.get<std::string>());
            else if (key == "freeze_encoder") r.freeze_encoder = val.get<bool>();
            else if (key == "encoder_hidden_dims")
                r.encoder_hidden_dims = val.get<std::vector<std::size_t>>();
            else if (key == "encoder_output_dim")
                r.encoder_output_dim = val.get<std::size_t>();
            else if (key == "scoring_scheme")
                r.scoring_scheme = parse_scheme_str(val.get<std::string>());
            else if (key == "coarse_segments") r.coarse_segments = val.get<std::size_t>();
            else if (key == "feature_dim") g.feature_dim = val.get<std::size_t>();
            else if (key == "n_train_normal") g.n_train_normal = val.get<std::size_t>();
            else if (key == "n_train_abnormal") g.n_train_abnormal = val.get<std::size_t>();
            else if (key == "n_test_normal") g.n_test_normal = val.get<std::size_t>();
            else if (key == "n_test_abnormal") g.n_test_abnormal = val.get<std::size_t>();
            else if (key == "snippets_per_video")
                g.snippets_per_video = val.get<std::size_t>();
            else if (key == "frames_per_fine_snippet")
                g.frames_per_fine_snippet = val.get<std::size_t>();
            else if (key == "anomaly_len_min") g.anomaly_len_min = val.get<std::size_t>();
            else if (key == "anomaly_len_max") g.anomaly_len_max = val.get<std::size_t>();
            else if (key == "bias_rate") g.bias_rate = val.get<double>();
            else if (key == "context_in_normal_rate")
                g.context_in_normal_rate = val.get<double>();
            else if (key == "counter_bias_test_rate")
                g.counter_bias_test_rate = val.get<double>();
            else if (key == "context_in_test_normal_rate")
                g.context_in_test_normal_rate = val.get<double>();
            else if (key == "noise_sigma") g.noise_sigma = val.get<double>();
            else if (key == "signal_scale") g.signal_scale = val.get<double>();
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw ConfigError("bad value for key '" + key + "': " + e.what());
        }
    }

    if (r.batch_size < 2) throw ConfigError("batch_size must be >= 2");
    if (r.division.confident_fraction <= 0.0 || r.division.confident_fraction > 1.0)
        throw ConfigError("confident_fraction must be in (0, 1]");
    if (g.anomaly_len_max >= g.snippets_per_video)
        throw ConfigError("anomaly_len_max must be < snippets_per_video");
    if (g.anomaly_len_min > g.anomaly_len_max)
        throw ConfigError("anomaly_len_min must be <= anomaly_len_max");
    return cfg;
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string default_config_json() {
    const ConfigFile cfg;
    json j;
    j["seed"] = cfg.run.seed;
    j["batch_size"] = cfg.run.batch_size;
    j["epochs_mil"] = cfg.run.epochs_mil;
    j["epochs_umil"] = cfg.run.epochs_umil;
    j["lr_base"] = cfg.run.optimizer.lr_base;
    j["beta1"] = cfg.run.optimizer.beta1;
    j["beta2"] = cfg.run.optimizer.beta2;
    j["adam_eps"] = cfg.run.optimizer.eps;
    j["weight_decay"] = cfg.run.optimizer.weight_decay;
    j["warmup_epochs"] = cfg.run.optimizer.warmup_epochs;
    j["alpha"] = cfg.run.weights.alpha;
    j["beta"] = cfg.run.weights.beta;
    j["lambda_st"] = cfg.run.weights.lambda_st;
    j["entropy_weight"] = cfg.run.weights.entropy_weight;
    j["tau"] = cfg.run.weights.tau;
    j["delta"] = cfg.run.weights.delta;
    j["aug_sigma"] = cfg.run.weights.aug_sigma;
    j["confident_fraction"] = cfg.run.division.confident_fraction;
    j["division_strategy"] = "historical_variance";
    j["label_mode"] = "rounded_mean";
    j["c_supervision"] = "video_max";
    j["freeze_encoder"] = cfg.run.freeze_encoder;
    j["encoder_hidden_dims"] = cfg.run.encoder_hidden_dims;
    j["encoder_output_dim"] = cfg.run.encoder_output_dim;
    j["scoring_scheme"] = "avg_prediction";
    j["coarse_segments"] = cfg.run.coarse_segments;
    j["feature_dim"] = cfg.gen.feature_dim;
    j["n_train_normal"] = cfg.gen.n_train_normal;
    j["n_train_abnormal"] = cfg.gen.n_train_abnormal;
    j["n_test_normal"] = cfg.gen.n_test_normal;
    j["n_test_abnormal"] = cfg.gen.n_test_abnormal;
    j["snippets_per_video"] = cfg.gen.snippets_per_video;
    j["frames_per_fine_snippet"] = cfg.gen.frames_per_fine_snippet;
    j["anomaly_len_min"] = cfg.gen.anomaly_len_min;
    j["anomaly_len_max"] = cfg.gen.anomaly_len_max;
    j["bias_rate"] = cfg.gen.bias_rate;
    j["context_in_normal_rate"] = cfg.gen.context_in_normal_rate;
    j["counter_bias_test_rate"] = cfg.gen.counter_bias_test_rate;
    j["context_in_test_normal_rate"] = cfg.gen.context_in_test_normal_rate;
    j["noise_sigma"] = cfg.gen.noise_sigma;
    j["signal_scale"] = cfg.gen.signal_scale;
    return j.dump(2) + "\n";
}

}  // namespace umil
