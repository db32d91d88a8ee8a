#include "qnet/quadnet.hpp"

#include <cmath>
#include <map>

namespace qnet {

namespace labels {

const std::vector<std::string>& plant_states() {
  static const std::vector<std::string> v{"a1q", "a1p", "b1q", "b1p",
                                          "a2q", "a2p", "b2q", "b2p"};
  return v;
}

const std::vector<std::string>& subsystem1_states() {
  static const std::vector<std::string> v{"a1q", "a2q", "b1q", "b2p"};
  return v;
}

const std::vector<std::string>& subsystem2_states() {
  static const std::vector<std::string> v{"a1p", "a2p", "b1p", "b2q"};
  return v;
}

const std::vector<std::string>& noise1() {
  static const std::vector<std::string> v{
      "in11.q",   "in23.p",   "in13.q",   "in21.q", "loss11.q",
      "loss12.q", "loss21.q", "loss22.p", "bs1.q",  "bs2.p"};
  return v;
}

const std::vector<std::string>& noise2() {
  static const std::vector<std::string> v{
      "in11.p",   "in23.q",   "in13.p",   "in21.p", "loss11.p",
      "loss12.p", "loss21.p", "loss22.q", "bs1.p",  "bs2.q"};
  return v;
}

const std::vector<std::string>& plant_noises() {
  static const std::vector<std::string> v = [] {
    auto out = noise1();
    out.insert(out.end(), noise2().begin(), noise2().end());
    return out;
  }();
  return v;
}

const std::vector<std::string>& extended_noises() {
  static const std::vector<std::string> v = [] {
    auto out = plant_noises();
    for (const char* h : {"h1.q", "h1.p", "h2.q", "h2.p"}) out.emplace_back(h);
    return out;
  }();
  return v;
}

const std::vector<std::string>& controls() {
  static const std::vector<std::string> v{"u11.q", "u11.p", "u21.q", "u21.p",
                                          "u12.q", "u12.p", "u22.q", "u22.p"};
  return v;
}

const std::vector<std::string>& plant_outputs() {
  static const std::vector<std::string> v{"out11.q", "out11.p", "out21.q", "out21.p",
                                          "out12.q", "out12.p", "out22.q", "out22.p"};
  return v;
}

const std::vector<std::string>& measurements() {
  static const std::vector<std::string> v{"yc11", "yc12", "yc21", "yc22"};
  return v;
}

Eigen::Index index_of(const std::vector<std::string>& list, const std::string& name) {
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i] == name) return static_cast<Eigen::Index>(i);
  throw Error(ErrorCode::InvalidParams, "unknown label '" + name + "'");
}

}  // namespace labels

namespace {

// Accumulates labelled coefficients into one matrix per delay tag.
class TermBuilder {
 public:
  TermBuilder(const std::vector<std::string>& rows, const std::vector<std::string>& cols)
      : rows_(rows), cols_(cols) {}

  void add(const std::string& row, const std::string& col, double value,
           double delay = 0.0) {
    if (value == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(delay);
    if (inserted)
      it->second = MatrixX<double>::Zero(static_cast<Eigen::Index>(rows_.size()),
                                         static_cast<Eigen::Index>(cols_.size()));
    it->second(labels::index_of(rows_, row), labels::index_of(cols_, col)) += value;
  }

  DelayTermsd build() const {
    DelayTermsd out;
    for (const auto& [delay, m] : terms_) out.push_back({m, delay});
    return canonicalize(std::move(out));
  }

 private:
  const std::vector<std::string>& rows_;
  const std::vector<std::string>& cols_;
  std::map<double, MatrixX<double>> terms_;
};

struct Coefficients {
  double drift_a, drift_b, pump, link, g, kh, k1, c, alpha, beta, delay;

  explicit Coefficients(const NetworkParams& p)
      : drift_a(-(p.gamma / 2.0 + p.kappa / 4.0 + p.chi / 4.0)),
        drift_b(-(p.kappa1 / 2.0 + p.chi / 4.0)),
        pump(p.epsilon / (2.0 * std::sqrt(2.0))),
        link(p.alpha * std::sqrt(p.kappa * p.kappa1 / 2.0)),
        g(std::sqrt(p.gamma)),
        kh(std::sqrt(p.kappa / 2.0)),
        k1(std::sqrt(p.kappa1)),
        c(std::sqrt(p.chi / 2.0)),
        alpha(p.alpha),
        beta(p.beta()),
        delay(p.transmission_delay) {}
};

// Drift and noise coupling of the quadrature Langevin equations.
void add_dynamics(const Coefficients& k, TermBuilder& a, TermBuilder& b) {
  const double T = k.delay;

  a.add("a1q", "a1q", k.drift_a);
  a.add("a1q", "b1q", k.pump);
  a.add("a1q", "b2p", -k.link, T);
  b.add("a1q", "in11.q", -k.g);
  b.add("a1q", "in23.p", -k.alpha * k.kh, T);
  b.add("a1q", "bs2.p", -k.beta * k.kh);
  b.add("a1q", "loss11.q", -k.c);

  a.add("a1p", "a1p", k.drift_a);
  a.add("a1p", "b1p", -k.pump);
  a.add("a1p", "b2q", k.link, T);
  b.add("a1p", "in11.p", -k.g);
  b.add("a1p", "in23.q", k.alpha * k.kh, T);
  b.add("a1p", "bs2.q", k.beta * k.kh);
  b.add("a1p", "loss11.p", -k.c);

  a.add("b1q", "a1q", k.pump);
  a.add("b1q", "b1q", k.drift_b);
  b.add("b1q", "in13.q", -k.k1);
  b.add("b1q", "loss12.q", -k.c);

  a.add("b1p", "a1p", -k.pump);
  a.add("b1p", "b1p", k.drift_b);
  b.add("b1p", "in13.p", -k.k1);
  b.add("b1p", "loss12.p", -k.c);

  a.add("a2q", "a2q", k.drift_a);
  a.add("a2q", "b2p", k.pump);
  a.add("a2q", "b1q", -k.link, T);
  b.add("a2q", "in21.q", -k.g);
  b.add("a2q", "in13.q", -k.alpha * k.kh, T);
  b.add("a2q", "bs1.q", k.beta * k.kh);
  b.add("a2q", "loss21.q", -k.c);

  a.add("a2p", "a2p", k.drift_a);
  a.add("a2p", "b2q", k.pump);
  a.add("a2p", "b1p", -k.link, T);
  b.add("a2p", "in21.p", -k.g);
  b.add("a2p", "in13.p", -k.alpha * k.kh, T);
  b.add("a2p", "bs1.p", -k.beta * k.kh);
  b.add("a2p", "loss21.p", -k.c);

  a.add("b2q", "a2p", k.pump);
  a.add("b2q", "b2q", k.drift_b);
  b.add("b2q", "in23.q", -k.k1);
  b.add("b2q", "loss22.q", -k.c);

  a.add("b2p", "a2q", k.pump);
  a.add("b2p", "b2p", k.drift_b);
  b.add("b2p", "in23.p", -k.k1);
  b.add("b2p", "loss22.p", -k.c);
}

// Field outputs ξ_out,11, ξ_out,21 (entanglement ports) and ξ_out,12, ξ_out,22.
void add_outputs(const Coefficients& k, TermBuilder& c, TermBuilder& d) {
  const double T = k.delay;
  const double link_out = k.alpha * k.k1;

  c.add("out11.q", "a1q", k.g);
  d.add("out11.q", "in11.q", 1.0);
  c.add("out11.p", "a1p", k.g);
  d.add("out11.p", "in11.p", 1.0);
  c.add("out21.q", "a2q", k.g);
  d.add("out21.q", "in21.q", 1.0);
  c.add("out21.p", "a2p", k.g);
  d.add("out21.p", "in21.p", 1.0);

  c.add("out12.q", "a1p", -k.kh);
  c.add("out12.q", "b2q", link_out, T);
  d.add("out12.q", "in23.q", k.alpha, T);
  d.add("out12.q", "bs2.q", k.beta);
  c.add("out12.p", "a1q", k.kh);
  c.add("out12.p", "b2p", link_out, T);
  d.add("out12.p", "in23.p", k.alpha, T);
  d.add("out12.p", "bs2.p", k.beta);

  c.add("out22.q", "a2q", k.kh);
  c.add("out22.q", "b1q", link_out, T);
  d.add("out22.q", "in13.q", k.alpha, T);
  d.add("out22.q", "bs1.q", k.beta);
  c.add("out22.p", "a2p", k.kh);
  c.add("out22.p", "b1p", link_out, T);
  d.add("out22.p", "in13.p", k.alpha, T);
  d.add("out22.p", "bs1.p", k.beta);
}

// Each modulator adds its control signal to one input field; u_c[i] drives
// exactly the columns of kModulatedField[i].
constexpr const char* kModulatedField[] = {"in11.q", "in11.p", "in21.q", "in21.p",
                                           "in13.q", "in13.p", "in23.q", "in23.p"};

bool travels_to_remote_node(Eigen::Index control) {
  // u11 and u12 go from the controller (at G2) to G1.
  return control == 0 || control == 1 || control == 4 || control == 5;
}

// Extracts the rows/cols named in `rows`/`cols` from every term.
DelayTermsd restrict(const DelayTermsd& terms, const std::vector<std::string>& all_rows,
                     const std::vector<std::string>& rows,
                     const std::vector<std::string>& all_cols,
                     const std::vector<std::string>& cols) {
  DelayTermsd out;
  for (const auto& t : terms) {
    MatrixX<double> m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            t.matrix(labels::index_of(all_rows, rows[i]),
                     labels::index_of(all_cols, cols[j]));
    out.push_back({std::move(m), t.delay});
  }
  return canonicalize(std::move(out));
}

}  // namespace

DelayedStateSpaced build_plant(const NetworkParams& params, bool with_control_inputs) {
  params.validate();
  const Coefficients k(params);

  std::vector<std::string> inputs = labels::plant_noises();
  if (with_control_inputs)
    inputs.insert(inputs.end(), labels::controls().begin(), labels::controls().end());

  const auto& states = labels::plant_states();
  const auto& outputs = labels::plant_outputs();
  TermBuilder a(states, states), b(states, inputs), c(outputs, states), d(outputs, inputs);
  add_dynamics(k, a, b);
  add_outputs(k, c, d);

  DelayedStateSpaced sys{states, inputs, outputs, a.build(), b.build(), c.build(), d.build()};

  if (with_control_inputs) {
    // Collapse each modulated noise column across delays, then retag with the
    // control-path delay.
    const MatrixX<double> b_total = sys.b();
    MatrixX<double> local = MatrixX<double>::Zero(kPlantStates, sys.input_dim());
    MatrixX<double> remote = local;
    for (Eigen::Index u = 0; u < kControls; ++u) {
      const Eigen::Index col = kPlantNoises + u;
      const auto src = b_total.col(labels::index_of(inputs, kModulatedField[u]));
      (travels_to_remote_node(u) ? remote : local).col(col) = src;
    }
    sys.b_terms.push_back({local, 0.0});
    sys.b_terms.push_back({remote, params.control_delay});
    sys.b_terms = canonicalize(std::move(sys.b_terms));
  }
  sys.validate();
  return sys;
}

SubsystemPair build_uncontrolled_subsystems(const NetworkParams& params) {
  const DelayedStateSpaced plant = build_plant(params, false);
  const auto ent = entanglement_outputs(params);
  const auto& states = labels::plant_states();
  const auto& noises = labels::plant_noises();

  auto make = [&](const std::vector<std::string>& sub_states,
                  const std::vector<std::string>& sub_noises, Eigen::Index row,
                  const std::string& out_label) {
    DelayedStateSpaced sys;
    sys.state_labels = sub_states;
    sys.input_labels = sub_noises;
    sys.output_labels = {out_label};
    sys.a_terms = restrict(plant.a_terms, states, sub_states, states, sub_states);
    sys.b_terms = restrict(plant.b_terms, states, sub_states, noises, sub_noises);
    MatrixX<double> c(1, 4), d(1, 10);
    for (Eigen::Index j = 0; j < 4; ++j)
      c(0, j) = ent.c(row, labels::index_of(states, sub_states[static_cast<std::size_t>(j)]));
    const auto& ext = labels::extended_noises();
    for (Eigen::Index j = 0; j < 10; ++j)
      d(0, j) = ent.d(row, labels::index_of(ext, sub_noises[static_cast<std::size_t>(j)]));
    sys.c_terms = canonicalize(DelayTermsd{{c, 0.0}});
    sys.d_terms = canonicalize(DelayTermsd{{d, 0.0}});
    sys.validate();
    return sys;
  };

  return {make(labels::subsystem1_states(), labels::noise1(), 0, "x1+x2"),
          make(labels::subsystem2_states(), labels::noise2(), 1, "y1-y2")};
}

DelayedStateSpaced build_measurement_map(const NetworkParams& params) {
  params.validate();
  const Coefficients k(params);
  const double T = k.delay;
  const double sk = std::sqrt(params.kappa) / 2.0;
  const double ak = params.alpha * std::sqrt(params.kappa1 / 2.0);
  const double r = 1.0 / std::sqrt(2.0);

  const auto& states = labels::plant_states();
  const auto& noises = labels::extended_noises();
  const auto& rows = labels::measurements();
  TermBuilder c(rows, states), d(rows, noises);

  c.add("yc11", "a2q", sk);
  c.add("yc11", "b1q", ak);
  d.add("yc11", "in13.q", k.alpha * r);
  d.add("yc11", "bs1.q", k.beta * r);
  d.add("yc11", "h2.q", r);

  c.add("yc12", "a2p", -sk);
  c.add("yc12", "b1p", -ak);
  d.add("yc12", "in13.p", -k.alpha * r);
  d.add("yc12", "bs1.p", -k.beta * r);
  d.add("yc12", "h2.p", r);

  c.add("yc21", "a1p", -sk, T);
  c.add("yc21", "b2q", ak, T);
  d.add("yc21", "in23.q", k.alpha * r, T);
  d.add("yc21", "bs2.q", k.beta * r, T);
  d.add("yc21", "h1.q", r, T);

  c.add("yc22", "a1q", -sk, T);
  c.add("yc22", "b2p", -ak, T);
  d.add("yc22", "in23.p", -k.alpha * r, T);
  d.add("yc22", "bs2.p", -k.beta * r, T);
  d.add("yc22", "h1.p", r, T);

  DelayedStateSpaced sys{states, noises, rows, {}, {}, c.build(), d.build()};
  sys.validate();
  return sys;
}

EntanglementOutputs entanglement_outputs(const NetworkParams& params) {
  params.validate();
  const double g = std::sqrt(params.gamma);
  const auto& states = labels::plant_states();
  const auto& noises = labels::extended_noises();
  EntanglementOutputs out{MatrixX<double>::Zero(2, kPlantStates),
                          MatrixX<double>::Zero(2, kExtendedNoises)};
  out.c(0, labels::index_of(states, "a1q")) = g;
  out.c(0, labels::index_of(states, "a2q")) = g;
  out.d(0, labels::index_of(noises, "in11.q")) = 1.0;
  out.d(0, labels::index_of(noises, "in21.q")) = 1.0;
  out.c(1, labels::index_of(states, "a1p")) = g;
  out.c(1, labels::index_of(states, "a2p")) = -g;
  out.d(1, labels::index_of(noises, "in11.p")) = 1.0;
  out.d(1, labels::index_of(noises, "in21.p")) = -1.0;
  return out;
}

}  // namespace qnet
