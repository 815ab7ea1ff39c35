// Copyright 2026 The tabmia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tabmia/attack_net.hpp"
#include "tabmia/autoencoder.hpp"
#include "tabmia/dataset.hpp"
#include "tabmia/denoiser.hpp"
#include "tabmia/errors.hpp"
#include "tabmia/eval.hpp"
#include "tabmia/pipeline.hpp"
#include "tabmia/schedule.hpp"
#include "tabmia/secmi.hpp"

namespace py = pybind11;
using namespace tabmia;

namespace {

std::vector<Membership> to_labels(const std::vector<int>& bits) {
  std::vector<Membership> labels;
  labels.reserve(bits.size());
  for (int b : bits) {
    labels.push_back(b ? Membership::kMember : Membership::kNonmember);
  }
  return labels;
}

std::vector<int> from_labels(const std::vector<Membership>& labels) {
  std::vector<int> bits;
  bits.reserve(labels.size());
  for (auto label : labels) {
    bits.push_back(label == Membership::kMember ? 1 : 0);
  }
  return bits;
}

TrainConfig make_train_config(int batch_size, int epochs, int64_t max_steps,
                              double learning_rate, uint64_t seed,
                              const std::string& optimizer) {
  TrainConfig cfg;
  cfg.batch_size = batch_size;
  cfg.epochs = epochs;
  cfg.max_steps = max_steps;
  cfg.learning_rate = learning_rate;
  cfg.seed = seed;
  cfg.optimizer = optimizer_kind_from_string(optimizer);
  return cfg;
}

TErrorMatrix make_terror_matrix(const Eigen::MatrixXd& errors,
                                const std::vector<int>& member_bits, int t) {
  TErrorMatrix matrix;
  matrix.t = t;
  matrix.errors = errors;
  matrix.labels = to_labels(member_bits);
  for (int c = 0; c < errors.cols(); ++c) {
    matrix.column_map.push_back(c);
    matrix.column_names.push_back("dim_" + std::to_string(c));
    matrix.column_ids.push_back(c);
  }
  return matrix;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Membership-inference privacy audit for tabular diffusion models";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError",
                                          PyExc_ArithmeticError);
  py::register_exception<MissingArtifactError>(m, "MissingArtifactError",
                                               PyExc_FileNotFoundError);

  py::class_<NoiseSchedule>(m, "NoiseSchedule")
      .def_static("linear", &NoiseSchedule::linear, py::arg("timesteps"),
                  py::arg("beta_start"), py::arg("beta_end"))
      .def_static("cosine", &NoiseSchedule::cosine, py::arg("timesteps"),
                  py::arg("s"))
      .def_property_readonly("timesteps", &NoiseSchedule::timesteps)
      .def("beta", &NoiseSchedule::beta, py::arg("t"))
      .def("alpha", &NoiseSchedule::alpha, py::arg("t"))
      .def("alpha_bar", &NoiseSchedule::alpha_bar, py::arg("t"));

  py::class_<Denoiser>(m, "Denoiser")
      .def(py::init([](int input_dim, const std::vector<int>& hidden,
                       int embed_dim, uint64_t seed,
                       const NoiseSchedule& schedule) {
             return Denoiser(input_dim, hidden, embed_dim, seed, schedule);
           }),
           py::arg("input_dim"), py::arg("hidden"), py::arg("embed_dim"),
           py::arg("seed"), py::arg("schedule"))
      .def_property_readonly("dim", &Denoiser::dim)
      .def(
          "predict",
          [](const Denoiser& model, const Eigen::MatrixXd& xt, int t) {
            return model.predict(xt, t);
          },
          py::arg("xt"), py::arg("t"))
      .def("get_parameters",
           [](const Denoiser& model) { return model.parameters(); })
      .def("set_parameters",
           [](Denoiser& model, const Eigen::VectorXd& values) {
             if (values.size() != model.parameters().size()) {
               throw ValidationError("parameter vector size mismatch");
             }
             model.parameters() = values;
           })
      .def("parameter_layout", [](const Denoiser& model) {
        std::vector<std::tuple<std::string, int64_t, int, int>> layout;
        for (const auto& block : model.parameter_layout()) {
          layout.emplace_back(block.name, block.offset, block.rows,
                              block.cols);
        }
        return layout;
      });

  m.def(
      "train_denoiser",
      [](Denoiser& model, const Eigen::MatrixXd& data, int batch_size,
         int epochs, int64_t max_steps, double learning_rate, uint64_t seed,
         const std::string& optimizer) {
        const auto result = train_denoiser(
            model, data,
            make_train_config(batch_size, epochs, max_steps, learning_rate,
                              seed, optimizer));
        return py::make_tuple(result.epoch_loss, result.steps);
      },
      py::arg("model"), py::arg("data"), py::arg("batch_size") = 256,
      py::arg("epochs") = 1, py::arg("max_steps") = 0,
      py::arg("learning_rate") = 1e-3, py::arg("seed") = 0,
      py::arg("optimizer") = "adam");

  m.def(
      "diffusion_loss",
      [](const Denoiser& model, const Eigen::MatrixXd& batch,
         uint64_t noise_seed) {
        const auto result = diffusion_loss(model, batch, noise_seed);
        return py::make_tuple(result.loss, result.grads);
      },
      py::arg("model"), py::arg("batch"), py::arg("noise_seed"));

  m.def("sample_rows", &sample_rows, py::arg("model"), py::arg("n"),
        py::arg("seed"));

  m.def(
      "deterministic_diffuse",
      [](const Denoiser& model, const Eigen::MatrixXd& x0, int t) {
        return deterministic_diffuse(model, x0, t, model.schedule());
      },
      py::arg("model"), py::arg("x0"), py::arg("t"));

  m.def(
      "t_error_matrix",
      [](const Denoiser& model, const Eigen::MatrixXd& rows,
         const std::vector<int>& member_bits, int t, bool literal_indexing) {
        const auto matrix =
            t_error_matrix(model, rows, to_labels(member_bits), t,
                           model.schedule(), {}, {}, literal_indexing);
        return py::make_tuple(matrix.errors, matrix.row_sums());
      },
      py::arg("model"), py::arg("rows"), py::arg("member_labels"),
      py::arg("t"), py::arg("literal_indexing") = false);

  m.def(
      "stat_attack",
      [](const Eigen::MatrixXd& errors, const std::vector<int>& member_bits,
         int t, double calibration_fraction, uint64_t seed) {
        const auto result = stat_attack(make_terror_matrix(errors, member_bits, t),
                                        calibration_fraction, seed);
        py::dict out;
        out["threshold"] = result.threshold;
        out["scores"] = result.scores;
        out["calibration_rows"] = result.calibration_rows;
        out["heldout_rows"] = result.heldout_rows;
        out["heldout_predictions"] = from_labels(result.heldout_predictions);
        out["calibration_balanced_accuracy"] =
            result.calibration_balanced_accuracy;
        return out;
      },
      py::arg("errors"), py::arg("member_labels"), py::arg("t") = 50,
      py::arg("calibration_fraction") = 0.2, py::arg("seed") = 0);

  m.def(
      "nn_attack",
      [](const Eigen::MatrixXd& errors, const std::vector<int>& member_bits,
         int t, double train_fraction, int batch_size, int epochs,
         double learning_rate, uint64_t seed, int channels, int blocks) {
        const auto result = nn_attack_train(
            make_terror_matrix(errors, member_bits, t), train_fraction,
            make_train_config(batch_size, epochs, 0, learning_rate, seed,
                              "adam"),
            AttackNetConfig{channels, blocks});
        py::dict out;
        out["heldout_rows"] = result.heldout_rows;
        out["heldout_scores"] = result.heldout_scores;
        out["heldout_labels"] = from_labels(result.heldout_labels);
        out["train_rows"] = result.train_rows;
        out["epoch_loss"] = result.epoch_loss;
        return out;
      },
      py::arg("errors"), py::arg("member_labels"), py::arg("t") = 50,
      py::arg("train_fraction") = 0.2, py::arg("batch_size") = 64,
      py::arg("epochs") = 100, py::arg("learning_rate") = 1e-3,
      py::arg("seed") = 0, py::arg("channels") = 16, py::arg("blocks") = 4);

  m.def(
      "roc",
      [](const Eigen::VectorXd& scores, const std::vector<int>& member_bits,
         bool higher_is_member, const std::vector<double>& fpr_targets) {
        const auto report =
            roc(scores, to_labels(member_bits), higher_is_member, fpr_targets);
        py::dict out;
        out["auc"] = report.auc;
        std::vector<std::tuple<double, double, double>> points;
        for (const auto& point : report.points) {
          points.emplace_back(point.threshold, point.fpr, point.tpr);
        }
        out["points"] = std::move(points);
        py::dict tpr;
        for (const auto& [target, value] : report.tpr_at) {
          tpr[py::cast(target)] = value;
        }
        out["tpr_at"] = std::move(tpr);
        return out;
      },
      py::arg("scores"), py::arg("member_labels"),
      py::arg("higher_is_member") = true,
      py::arg("fpr_targets") = std::vector<double>{0.01, 0.001});

  m.def(
      "dcr_score",
      [](const Eigen::MatrixXd& synthetic, const Eigen::MatrixXd& member,
         const Eigen::MatrixXd& nonmember, uint64_t seed) {
        const auto report = dcr(synthetic, member, nonmember, seed);
        py::dict out;
        out["dcr_score"] = report.dcr_score;
        out["ties"] = report.ties;
        out["distances_member"] = report.distances_member;
        out["distances_nonmember"] = report.distances_nonmember;
        return out;
      },
      py::arg("synthetic"), py::arg("member"), py::arg("nonmember"),
      py::arg("seed") = 0);

  m.def(
      "run_pipeline",
      [](const std::string& config_path, const std::string& run_dir) {
        cmd_all(RunConfig::from_file(config_path), run_dir);
      },
      py::arg("config_path"), py::arg("run_dir"),
      "Run prepare/train/sample/attack/report end to end.");

  m.attr("__version__") = "0.1.0";
}
