// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The AMH Authors
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

#include "amh/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "amh/error.hpp"

namespace amh {

bool GradCheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

double GradCheckReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_rel_error);
  return m;
}

std::vector<std::string> GradCheckReport::failing() const {
  std::vector<std::string> names;
  for (const auto& e : entries) {
    if (!e.passed) names.push_back(e.name);
  }
  return names;
}

double grad_relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const std::function<Tensor(Tape&)>& loss_fn,
                           std::span<const NamedTensor> params, double epsilon,
                           double tolerance) {
  if (!(epsilon > 0.0)) throw ConfigError("grad_check: epsilon must be positive");

  std::vector<Tensor> tensors;
  for (const auto& p : params) tensors.push_back(p.tensor);
  for (auto& t : tensors) t.zero_grad();

  {
    Tape tape;
    Tensor loss = loss_fn(tape);
    tape.backward(loss);
  }
  std::vector<std::vector<double>> analytic;
  for (auto& t : tensors) {
    analytic.emplace_back(t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                                       : std::vector<double>(t.numel(), 0.0));
    t.zero_grad();
  }

  auto evaluate = [&] {
    Tape tape;
    return loss_fn(tape).item();
  };

  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    GradCheckEntry entry;
    entry.name = params[k].name;
    entry.size = tensors[k].numel();
    auto values = tensors[k].mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + epsilon;
      const double f_plus = evaluate();
      values[i] = saved - epsilon;
      const double f_minus = evaluate();
      values[i] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * epsilon);
      const double rel = grad_relative_error(analytic[k][i], numeric);
      const double abs_err = std::abs(analytic[k][i] - numeric);
      if (rel > entry.max_rel_error || std::isnan(rel)) {
        entry.max_rel_error = std::isnan(rel) ? INFINITY : rel;
        entry.worst_index = i;
      }
      entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
    }
    entry.passed = entry.max_rel_error < tolerance;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace amh
