#pragma once

#include <string>

#include <json.hpp>

#include "msd/io_util.hpp"
#include "msd/multiscale.hpp"

namespace msd {

inline nlohmann::ordered_json schedule_to_json(const ScaleSchedule& s) {
  nlohmann::ordered_json j;
  j["lambda0"] = s.lambda0;
  j["lambda_growth"] = s.lambda_growth;
  j["a0"] = s.a0;
  j["a_decay"] = s.a_decay;
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["gamma"] = s.gamma;
  j["n_max"] = s.n_max;
  return j;
}

// Core trace payload: schedule, regime and the numeric per-scale columns.
// Element payloads (images, fields) are exported by the instantiating module.
template <class E>
nlohmann::ordered_json trace_to_json(const DecompositionTrace<E>& t) {
  nlohmann::ordered_json j;
  j["schedule"] = schedule_to_json(t.schedule);
  j["regime"] = to_string(t.regime);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t n = 0; n < t.size(); ++n) {
    nlohmann::ordered_json r;
    r["n"] = n;
    r["fidelity"] = t.fidelity[n];
    r["augmented"] = t.augmented[n];
    r["reg_increment"] = t.regularizer_of_increment[n];
    r["reg_sum"] = t.regularizer_of_sum[n];
    r["safeguard_used"] = t.inner_reports[n].safeguard_used;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

template <class E>
void trace_to_csv(const DecompositionTrace<E>& t, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"n", "fidelity", "augmented", "reg_increment", "reg_sum", "safeguard_used"});
  for (std::size_t n = 0; n < t.size(); ++n) {
    csv.row({std::to_string(n), fmt_double(t.fidelity[n]), fmt_double(t.augmented[n]),
             fmt_double(t.regularizer_of_increment[n]), fmt_double(t.regularizer_of_sum[n]),
             t.inner_reports[n].safeguard_used ? "1" : "0"});
  }
}

} // namespace msd
