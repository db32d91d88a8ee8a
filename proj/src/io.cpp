#include "qnet/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "qnet/quadnet.hpp"

namespace qnet {

namespace {

double get_number(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number())
    throw Error(ErrorCode::InvalidParams, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key))
      throw Error(ErrorCode::InvalidParams,
                  std::string("unknown key '") + key + "' in " + where);
}

json terms_to_json(const DelayTermsd& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back({{"delay", t.delay}, {"matrix", matrix_to_json(t.matrix)}});
  return out;
}

DelayTermsd terms_from_json(const json& j) {
  DelayTermsd out;
  for (const auto& t : j) out.push_back({matrix_from_json(t.at("matrix")), get_number(t, "delay")});
  return out;
}

}  // namespace

json matrix_to_json(const MatrixX<double>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

MatrixX<double> matrix_from_json(const json& j) {
  return detail::json_guard("matrix", [&] {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows))
      throw Error(ErrorCode::DimensionMismatch, "matrix: row count does not match 'rows'");
    MatrixX<double> m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const json& row = data[static_cast<std::size_t>(i)];
      if (row.size() != static_cast<std::size_t>(cols))
        throw Error(ErrorCode::DimensionMismatch, "matrix: column count does not match 'cols'");
      for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
  });
}

NetworkParams params_from_json(const json& j, NetworkParams p) {
  return detail::json_guard("network section", [&] {
    if (!j.is_object()) throw Error(ErrorCode::InvalidParams, "network section must be an object");
    reject_unknown(j, {"kappa", "gamma", "kappa1", "epsilon", "chi", "alpha", "T", "Tm", "rho"},
                   "network section");
    auto set = [&](const char* key, double& field) {
      if (j.contains(key)) field = get_number(j, key);
    };
    set("kappa", p.kappa);
    set("gamma", p.gamma);
    set("kappa1", p.kappa1);
    set("epsilon", p.epsilon);
    set("chi", p.chi);
    set("alpha", p.alpha);
    set("T", p.transmission_delay);
    set("Tm", p.control_delay);
    set("rho", p.rho);
    p.validate();
    return p;
  });
}

json params_to_json(const NetworkParams& p) {
  return {{"kappa", p.kappa}, {"gamma", p.gamma}, {"kappa1", p.kappa1},
          {"epsilon", p.epsilon}, {"chi", p.chi}, {"alpha", p.alpha},
          {"T", p.transmission_delay}, {"Tm", p.control_delay}, {"rho", p.rho}};
}

CostOptions cost_from_json(const json& j, CostOptions c) {
  return detail::json_guard("cost section", [&] {
    if (!j.is_object()) throw Error(ErrorCode::InvalidParams, "cost section must be an object");
    reject_unknown(j, {"structure", "weight"}, "cost section");
    if (j.contains("structure")) {
      const auto s = j.at("structure").get<std::string>();
      if (s == "separate") c.structure = CostStructure::Separate;
      else if (s == "joint") c.structure = CostStructure::Joint;
      else throw Error(ErrorCode::InvalidParams, "cost.structure must be 'separate' or 'joint'");
    }
    if (j.contains("weight")) {
      const auto w = j.at("weight").get<std::string>();
      if (w == "linear") c.weight = WeightForm::Linear;
      else if (w == "squared") c.weight = WeightForm::Squared;
      else throw Error(ErrorCode::InvalidParams, "cost.weight must be 'linear' or 'squared'");
    }
    return c;
  });
}

json cost_to_json(const CostOptions& c) {
  return {{"structure", c.structure == CostStructure::Separate ? "separate" : "joint"},
          {"weight", c.weight == WeightForm::Linear ? "linear" : "squared"}};
}

json model_to_json(const DelayedStateSpaced& sys) {
  return {{"state_labels", sys.state_labels},
          {"input_labels", sys.input_labels},
          {"output_labels", sys.output_labels},
          {"A", terms_to_json(sys.a_terms)},
          {"B", terms_to_json(sys.b_terms)},
          {"C", terms_to_json(sys.c_terms)},
          {"D", terms_to_json(sys.d_terms)}};
}

DelayedStateSpaced model_from_json(const json& j) {
  return detail::json_guard("model", [&] {
    DelayedStateSpaced sys;
    sys.state_labels = j.at("state_labels").get<std::vector<std::string>>();
    sys.input_labels = j.at("input_labels").get<std::vector<std::string>>();
    sys.output_labels = j.at("output_labels").get<std::vector<std::string>>();
    sys.a_terms = terms_from_json(j.at("A"));
    sys.b_terms = terms_from_json(j.at("B"));
    sys.c_terms = terms_from_json(j.at("C"));
    sys.d_terms = terms_from_json(j.at("D"));
    sys.validate();
    return sys;
  });
}

json controller_to_json(const LqgController& ctrl) {
  return {{"Ac", matrix_to_json(ctrl.ac)}, {"Bc", matrix_to_json(ctrl.bc)},
          {"Cc", matrix_to_json(ctrl.cc)}};
}

LqgController controller_from_json(const json& j) {
  return detail::json_guard("controller", [&] {
    LqgController c{matrix_from_json(j.at("Ac")), matrix_from_json(j.at("Bc")),
                    matrix_from_json(j.at("Cc"))};
    const auto n = c.ac.rows();
    if (c.ac.cols() != n || c.bc.rows() != n || c.cc.cols() != n || c.bc.cols() != kMeasurements ||
        c.cc.rows() != kControls)
      throw Error(ErrorCode::DimensionMismatch, "controller: inconsistent Ac/Bc/Cc shapes");
    if (!c.ac.allFinite() || !c.bc.allFinite() || !c.cc.allFinite())
      throw Error(ErrorCode::InvalidParams, "controller: non-finite entries");
    return c;
  });
}

json report_to_json(const StabilityReport& rep) {
  json roots = json::array();
  for (const auto& r : rep.rightmost_roots) roots.push_back({{"re", r.real()}, {"im", r.imag()}});
  json j = {{"verdict", std::string(to_string(rep.verdict))},
            {"converged", rep.converged},
            {"discretization_order", rep.discretization_order},
            {"abs_tol", rep.abs_tol},
            {"rightmost_roots", std::move(roots)},
            {"refinement_failures", rep.refinement_failures}};
  if (!rep.rightmost_roots.empty()) j["spectral_abscissa"] = rep.spectral_abscissa();
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

void write_spectra_csv(std::ostream& os, const SpectraResult& res) {
  auto field = [](double x) {
    if (!(x > 0.0)) return std::string("nan");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", to_db(x));
    return std::string(buf);
  };
  os << "omega_rad_s,v_plus_db,v_minus_db,v_sum_db,entangled\n";
  char w[32];
  for (std::size_t i = 0; i < res.grid.size(); ++i) {
    std::snprintf(w, sizeof w, "%.8e", res.grid[i]);
    os << w << ',' << field(res.v_plus[i]) << ',' << field(res.v_minus[i]) << ','
       << field(res.v_sum[i]) << ',' << (res.entangled_mask[i] ? 1 : 0) << '\n';
  }
}

void write_spectra_csv(const std::filesystem::path& path, const SpectraResult& res) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_spectra_csv(out, res);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace qnet
