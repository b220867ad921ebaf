#include "qhp/nonideal_fridge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qhp/errors.hpp"

namespace qhp {

std::string_view to_string(DissipatorBasis basis) noexcept {
  switch (basis) {
    case DissipatorBasis::local: return "local";
    case DissipatorBasis::dressed: return "dressed";
  }
  return "?";
}

double ThreeQubitConfig::frequency(Bath b) const {
  switch (b) {
    case Bath::work: return omega_w;
    case Bath::hot: return omega_h();
    case Bath::cold: return omega_c;
  }
  return 0.0;
}

const BathSpec& ThreeQubitConfig::bath(Bath label) const {
  switch (label) {
    case Bath::work: return work;
    case Bath::hot: return hot;
    case Bath::cold: return cold;
  }
  return work;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

}  // namespace

void validate_structure(const ThreeQubitConfig& cfg) {
  if (!(cfg.omega_c > 0.0) || !std::isfinite(cfg.omega_c)) fail("omega_c must be finite and > 0");
  if (!(cfg.omega_w > 0.0) || !std::isfinite(cfg.omega_w)) fail("omega_w must be finite and > 0");
  if (!(cfg.g >= 0.0) || !std::isfinite(cfg.g)) fail("g must be finite and >= 0");
  for (Bath label : kAllBaths) {
    const BathSpec& b = cfg.bath(label);
    if (b.label != label) fail("bath in the " + std::string(to_string(label)) + " slot is mislabelled");
    validate(b);
    if (b.squeeze_r != 0.0 || b.saturated) fail("three-qubit model takes plain thermal baths only");
  }
}

std::vector<std::string> validate(const ThreeQubitConfig& cfg) {
  validate_structure(cfg);
  if (!(cfg.g > 0.0)) fail("g must be > 0");
  for (Bath label : kAllBaths) {
    if (!(cfg.bath(label).gamma > 0.0)) fail(std::string(to_string(label)) + " bath: gamma must be > 0");
  }
  if (!(cfg.work.temperature > cfg.hot.temperature)) fail("require T_w > T_h");
  if (!(cfg.hot.temperature > cfg.cold.temperature)) fail("require T_h > T_c");

  std::vector<std::string> warnings;
  const double limit = kThreeBodyCouplingRatio * std::min(cfg.omega_c, cfg.omega_w);
  if (cfg.g > limit) {
    std::ostringstream os;
    os << "g = " << cfg.g << " exceeds " << kThreeBodyCouplingRatio << " * min(omega_c, omega_w) = " << limit;
    warnings.push_back(os.str());
  }
  return warnings;
}

int qubit_of(Bath b) noexcept {
  switch (b) {
    case Bath::cold: return 0;
    case Bath::work: return 1;
    case Bath::hot: return 2;
  }
  return 0;
}

CMatrix embed_qubit_operator(const CMatrix& op, int qubit) {
  const CMatrix id = CMatrix::Identity(2, 2);
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = 0; k < 3; ++k) out = kron(out, k == qubit ? op : id);
  return out;
}

namespace {

CMatrix lowering() {
  CMatrix s = CMatrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

}  // namespace

CMatrix build_three_qubit_hamiltonian(const ThreeQubitConfig& cfg) {
  validate_structure(cfg);
  const CMatrix s = lowering();
  const CMatrix number = s.adjoint() * s;
  CMatrix h = CMatrix::Zero(8, 8);
  for (Bath b : kAllBaths) h += cfg.frequency(b) * embed_qubit_operator(number, qubit_of(b));
  // |110> is index 6, |001> is index 1
  h(6, 1) += cfg.g;
  h(1, 6) += cfg.g;
  return h;
}

namespace {

struct BohrJump {
  double omega;
  CMatrix jump;
};

// sigma^x of one qubit split by the Bohr frequencies of h; only lowering
// (positive frequency) parts are kept.
std::vector<BohrJump> dressed_jumps(const CMatrix& h, const CMatrix& coupling) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  const Eigen::VectorXd& e = eig.eigenvalues();
  const CMatrix& u = eig.eigenvectors();
  const CMatrix x = u.adjoint() * coupling * u;
  const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
  const double tie = 1e-9 * scale;

  std::vector<BohrJump> groups;
  for (Index i = 0; i < e.size(); ++i) {
    for (Index j = 0; j < e.size(); ++j) {
      const double omega = e(j) - e(i);
      if (omega <= tie || std::abs(x(i, j)) <= 1e-14) continue;
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const BohrJump& gj) { return std::abs(gj.omega - omega) <= tie; });
      if (it == groups.end()) {
        groups.push_back({omega, CMatrix::Zero(e.size(), e.size())});
        it = groups.end() - 1;
      }
      it->jump(i, j) += x(i, j);
    }
  }
  std::sort(groups.begin(), groups.end(), [](const BohrJump& a, const BohrJump& b) { return a.omega < b.omega; });
  for (BohrJump& gj : groups) gj.jump = u * gj.jump * u.adjoint();
  return groups;
}

}  // namespace

GeneratorParts build_three_qubit_parts(const ThreeQubitConfig& cfg) {
  validate_structure(cfg);
  GeneratorParts parts;
  parts.hamiltonian = build_three_qubit_hamiltonian(cfg);
  parts.unitary = commutator_superop(parts.hamiltonian);
  const CMatrix s = lowering();
  for (Bath b : kAllBaths) {
    SuperOp d = SuperOp::zero(8);
    const BathSpec& bath = cfg.bath(b);
    if (cfg.basis == DissipatorBasis::local) {
      d = build_dissipator(embed_qubit_operator(s, qubit_of(b)), decay_rates(bath, cfg.frequency(b)));
    } else {
      const CMatrix coupling = embed_qubit_operator(s + s.adjoint(), qubit_of(b));
      for (const BohrJump& gj : dressed_jumps(parts.hamiltonian, coupling)) {
        d += build_dissipator(gj.jump, decay_rates(bath, gj.omega));
      }
    }
    switch (b) {
      case Bath::work: parts.work = std::move(d); break;
      case Bath::hot: parts.hot = std::move(d); break;
      case Bath::cold: parts.cold = std::move(d); break;
    }
  }
  return parts;
}

SteadySolution solve_three_qubit(const ThreeQubitConfig& cfg, const Tolerances& tol) {
  SteadySolution s = solve_generator(build_three_qubit_parts(cfg), cfg.temperatures(), tol);
  const double ideal_ratio = cfg.omega_c / cfg.omega_w;
  s.residuals["ideality_cold_work"] =
      s.q.work != 0.0 ? std::abs(std::abs(s.q.cold / s.q.work) / ideal_ratio - 1.0) : 0.0;
  return s;
}

}  // namespace qhp
