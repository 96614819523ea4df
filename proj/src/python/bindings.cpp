// bindings.cpp
//
// pybind11 surface over the core operations: scalar math, AUC, dataset
// generation, training runs and evaluation.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "umil/config.hpp"
#include "umil/eval.hpp"
#include "umil/synthgen.hpp"
#include "umil/trainer.hpp"

namespace py = pybind11;
using namespace umil;

PYBIND11_MODULE(_umil, m) {
    m.doc() = "Unbiased MIL training for weakly supervised anomaly detection";

    m.def("sigmoid", &sigmoid, py::arg("z"));
    m.def("softmax2", &softmax2, py::arg("z1"), py::arg("z2"));
    m.def("bce", &bce, py::arg("y_hat"), py::arg("y"));
    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def(
        "cosine_warmup_lr",
        [](double progress, double lr_base, std::size_t warmup, std::size_t total) {
            OptimizerConfig cfg;
            cfg.lr_base = lr_base;
            cfg.warmup_epochs = warmup;
            cfg.total_epochs = total;
            return cosine_warmup_lr(progress, cfg);
        },
        py::arg("epoch_progress"), py::arg("lr_base"), py::arg("warmup_epochs"),
        py::arg("total_epochs"));

    m.def(
        "roc_auc",
        [](const std::vector<double>& scores, const std::vector<int>& labels) {
            return roc_auc(scores, labels);
        },
        py::arg("scores"), py::arg("labels"),
        "Returns (auc, roc_points) with Mann-Whitney tie handling");

    m.def(
        "generate_dataset",
        [](const std::string& config_json, const std::string& out_dir) {
            generate(parse_config(config_json).gen, out_dir);
        },
        py::arg("config_json"), py::arg("out_dir"));

    m.def("default_config", &default_config_json);

    m.def(
        "train",
        [](const std::string& config_json, const std::string& dataset_dir,
           const std::string& out_dir) {
            RunResult r = run(parse_config(config_json).run, dataset_dir, out_dir);
            py::dict d;
            d["auc_overall"] = r.metrics_final.auc_overall;
            if (r.metrics_final.auc_abnormal)
                d["auc_abnormal"] = *r.metrics_final.auc_abnormal;
            d["mil_auc_overall"] = r.metrics_mil.auc_overall;
            if (r.metrics_mil.auc_abnormal)
                d["mil_auc_abnormal"] = *r.metrics_mil.auc_abnormal;
            return d;
        },
        py::arg("config_json"), py::arg("dataset_dir"), py::arg("out_dir"));

    m.def(
        "evaluate_checkpoint",
        [](const std::string& checkpoint, const std::string& dataset_dir,
           const std::string& scheme, std::size_t coarse_segments) {
            ModelState model = ModelState::load_checkpoint(checkpoint);
            auto [manifest, store] = load_dataset(dataset_dir);
            MetricsReport r = evaluate(model, manifest, store,
                                       scheme == "avg_feature" ? ScoringScheme::avg_feature
                                                               : ScoringScheme::avg_prediction,
                                       coarse_segments);
            return metrics_to_json(r);
        },
        py::arg("checkpoint"), py::arg("dataset_dir"), py::arg("scheme") = "avg_prediction",
        py::arg("coarse_segments") = 32);

    m.def(
        "oracle_bayes_auc",
        [](const std::string& dataset_dir) {
            auto [manifest, store] = load_dataset(dataset_dir);
            return oracle_bayes_auc(manifest, store);
        },
        py::arg("dataset_dir"));
}
