#include "fairround/instance.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

namespace fairround {

using nlohmann::json;

int Instance::max_proc(int j) const {
  int best = 0;
  for (int i = 0; i < machine_count; ++i) best = std::max(best, proc[i][j]);
  return best;
}

int Instance::min_proc(int j) const {
  int best = std::numeric_limits<int>::max();
  for (int i = 0; i < machine_count; ++i)
    if (proc[i][j] > 0) best = std::min(best, proc[i][j]);
  return best == std::numeric_limits<int>::max() ? 0 : best;
}

std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  if (inst.machine_count < 1) out.push_back("machine count must be positive");
  if (inst.job_count < 1) out.push_back("job count must be positive");
  if (static_cast<int>(inst.proc.size()) != inst.machine_count)
    out.push_back("p must have one row per machine");
  for (int i = 0; i < static_cast<int>(inst.proc.size()); ++i) {
    if (static_cast<int>(inst.proc[i].size()) != inst.job_count) {
      out.push_back("p row " + std::to_string(i + 1) +
                    " must have one entry per job");
      continue;
    }
    for (int j = 0; j < inst.job_count; ++j) {
      if (inst.proc[i][j] < 0)
        out.push_back("p_ij must be >= 1 (machine " + std::to_string(i + 1) +
                      ", job " + std::to_string(j + 1) + ")");
    }
  }
  if (static_cast<int>(inst.weight.size()) != inst.job_count) {
    out.push_back("w must have one entry per job");
  } else {
    for (int j = 0; j < inst.job_count; ++j)
      if (!(inst.weight[j] > 0.0))
        out.push_back("weight of job " + std::to_string(j + 1) +
                      " must be positive");
  }
  if (static_cast<int>(inst.proc.size()) == inst.machine_count) {
    for (int j = 0; j < inst.job_count; ++j) {
      bool any = false;
      for (int i = 0; i < inst.machine_count; ++i)
        if (static_cast<int>(inst.proc[i].size()) == inst.job_count &&
            inst.proc[i][j] > 0)
          any = true;
      if (!any)
        out.push_back("job " + std::to_string(j + 1) +
                      " has no eligible machine");
    }
  }
  return out;
}

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed instance JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "machines" && k != "jobs" && k != "p" && k != "w")
      throw ParseError("unknown field '" + k + "'");
  }
  for (const char* k : {"machines", "jobs", "p", "w"})
    if (!doc.contains(k))
      throw ParseError(std::string("missing field '") + k + "'");

  Instance inst;
  try {
    inst.machine_count = doc.at("machines").get<int>();
    inst.job_count = doc.at("jobs").get<int>();
    const json& p = doc.at("p");
    if (!p.is_array()) throw ParseError("p must be an array of rows");
    for (const json& row : p) {
      if (!row.is_array()) throw ParseError("p rows must be arrays");
      std::vector<int> r;
      for (const json& cell : row) {
        if (cell.is_null()) {
          r.push_back(0);
        } else if (cell.is_number_integer()) {
          int v = cell.get<int>();
          if (v < 1) throw ParseError("p_ij must be >= 1");
          r.push_back(v);
        } else {
          throw ParseError("p entries must be integers or null");
        }
      }
      inst.proc.push_back(std::move(r));
    }
    inst.weight = doc.at("w").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed instance JSON: ") + e.what());
  }

  std::vector<std::string> bad = validate(inst);
  if (!bad.empty()) throw ParseError(bad.front());
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  json p = json::array();
  for (const auto& row : inst.proc) {
    json r = json::array();
    for (int v : row) {
      if (v > 0)
        r.push_back(v);
      else
        r.push_back(nullptr);
    }
    p.push_back(std::move(r));
  }
  json doc = {{"machines", inst.machine_count},
              {"jobs", inst.job_count},
              {"p", std::move(p)},
              {"w", inst.weight}};
  return doc.dump(2) + "\n";
}

Instance generate_random(const GenParams& params, uint64_t seed) {
  Instance inst;
  inst.machine_count = params.machine_count;
  inst.job_count = params.job_count;
  inst.proc.assign(params.machine_count,
                   std::vector<int>(params.job_count, 0));
  inst.weight.assign(params.job_count, 0.0);
  Rng rng = Rng(seed).split(0x67656e);
  const int span = params.p_max - params.p_min + 1;
  for (int j = 0; j < params.job_count; ++j) {
    Rng jr = rng.split(j);
    for (;;) {  // re-draw until the job keeps at least one machine
      bool any = false;
      for (int i = 0; i < params.machine_count; ++i) {
        if (jr.uniform() < params.absent_prob) {
          inst.proc[i][j] = 0;
        } else {
          inst.proc[i][j] =
              params.p_min + static_cast<int>(jr.below(span));
          any = true;
        }
      }
      if (any) break;
    }
    inst.weight[j] = jr.uniform(params.w_min, params.w_max);
    if (params.w_min == params.w_max) inst.weight[j] = params.w_min;
  }
  return inst;
}

}  // namespace fairround
