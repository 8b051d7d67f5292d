#include "constikit/tangent_check.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "constikit/errors.hpp"
#include "constikit/materials.hpp"

namespace constikit::tangent_check {

namespace {

constexpr double kFiniteStep = 1e-6;
constexpr double kSmallStep = 1e-5;
constexpr int kMaxRedraws = 20;

bool path_dependent(const MaterialInfo& info) { return info.nstatv_user > 0; }

std::vector<double> initial_bridge_state(const UmatMaterial& m, const std::vector<double>& props) {
  const MaterialInfo& info = m.info();
  const StateLayout layout{info.regime, info.nstatv_user};
  const auto user = m.initial_state(props);
  return pack_state(layout, 0.0, UmatStress{},
                    info.regime == Regime::SmallStrain ? std::optional<UmatStrain>(UmatStrain{})
                                                       : std::nullopt,
                    user);
}

double plastic_of(const UmatMaterial& m, const std::vector<double>& state) {
  const StateLayout layout{m.info().regime, m.info().nstatv_user};
  return m.plastic_measure(std::span<const double>(state).subspan(
      static_cast<std::size_t>(layout.header_length())));
}

Eigen::VectorXd stress_vector(const HostResponse& r, Regime regime) {
  if (regime == Regime::SmallStrain) return r.s.vec();
  const Tensor2 s = from_host_stress(r.s);
  Eigen::VectorXd out(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[pair_index(i, j)] = s(i, j);
  return out;
}

struct Probe {
  Eigen::VectorXd stress;
  bool dissipating = false;
};

}  // namespace

double Report::max_error() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.rel_error);
  return m;
}

const Sample& Report::worst() const {
  if (samples.empty()) throw ContractViolation("tangent check report has no samples");
  return *std::max_element(samples.begin(), samples.end(),
                           [](const Sample& a, const Sample& b) { return a.rel_error < b.rel_error; });
}

double default_tolerance(const MaterialInfo& info) { return path_dependent(info) ? 1e-3 : 1e-4; }

std::vector<double> default_props(const MaterialInfo& info) {
  if (info.name == "j2_plasticity") return {70e9, 0.2, 243e6, 2171e6};
  if (info.name == "crystal_plasticity") return materials::reference_crystal_props(0.3, 0.7, 1.1);
  if (info.nprops == 2) return {1e6, 0.3};
  throw ContractViolation("no default properties for material '" + info.name +
                          "'; pass them explicitly");
}

Report run(const UmatMaterial& material, const Options& options) {
  const MaterialInfo& info = material.info();
  if (options.samples <= 0) throw ContractViolation("tangent check needs at least one sample");
  Report report;
  report.material = info.name;
  report.regime = info.regime;
  report.tolerance = options.tolerance.value_or(default_tolerance(info));
  const std::vector<double> props = options.props.empty() ? default_props(info) : options.props;
  if (static_cast<int>(props.size()) != info.nprops)
    throw ContractViolation("material '" + info.name + "' expects " + std::to_string(info.nprops) +
                            " properties, got " + std::to_string(props.size()));

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const bool finite = info.regime == Regime::FiniteStrain;
  const double amplitude = finite ? (path_dependent(info) ? 0.01 : 0.1) : 4e-3;
  const int ncols = finite ? 9 : 6;
  const auto state0 = initial_bridge_state(material, props);

  auto random_f = [&](const Tensor2& base) {
    for (;;) {
      Tensor2 f = base;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f(i, j) += amplitude * unit(rng);
      if (det3(f) > 0.2) return f;
    }
  };
  auto random_strain = [&](const HostStrain& base) {
    HostStrain e = base;
    for (int i = 0; i < 6; ++i) e[i] += amplitude * unit(rng);
    return e;
  };

  for (int n = 0; n < options.samples; ++n) {
    for (int attempt = 0;; ++attempt) {
      Sample s;
      s.index = n;
      HostRequest first;
      first.regime = info.regime;
      first.par = props;
      first.delta = 1.0;
      first.state = state0;
      if (finite) {
        s.f_old = random_f(Tensor2::Identity());
        s.f_new = random_f(s.f_old);
        first.f_new = s.f_old;
      } else {
        s.strain_old = random_strain(HostStrain{});
        s.strain_new = random_strain(s.strain_old);
        first.strain = s.strain_old;
      }
      try {
        HostRequest second = first;
        second.state = bridge::eval(first, material).state;
        const double committed_plastic = plastic_of(material, second.state);
        if (finite) {
          second.f_old = s.f_old;
          second.f_new = s.f_new;
        } else {
          second.strain = s.strain_new;
        }
        auto probe = [&](const HostRequest& r, const bridge::TangentFault& fault, Eigen::MatrixXd* k) {
          const HostResponse resp = bridge::eval(r, material, fault);
          if (k) *k = resp.tangent;
          return Probe{stress_vector(resp, info.regime),
                       plastic_of(material, resp.state) > committed_plastic};
        };
        const Probe center = probe(second, options.fault, &s.analytic);
        s.numeric.resize(ncols, ncols);
        bool regime_change = false;
        for (int c = 0; c < ncols; ++c) {
          HostRequest plus = second, minus = second;
          double h;
          if (finite) {
            h = kFiniteStep;
            plus.f_new(c / 3, c % 3) += h;
            minus.f_new(c / 3, c % 3) -= h;
          } else {
            // Engineering-shear columns: a tensorial shear moves by half the step.
            h = kSmallStep;
            const double d = c < 3 ? h : 0.5 * h;
            plus.strain[c] += d;
            minus.strain[c] -= d;
          }
          const Probe p = probe(plus, {}, nullptr);
          const Probe m = probe(minus, {}, nullptr);
          regime_change = regime_change || p.dissipating != center.dissipating ||
                          m.dissipating != center.dissipating;
          s.numeric.col(c) = (p.stress - m.stress) / (2.0 * h);
        }
        if (regime_change && attempt < kMaxRedraws) continue;
        const double ref = s.numeric.norm();
        s.rel_error = (s.analytic - s.numeric).norm() / (ref > 0 ? ref : 1.0);
        s.abs_error = (s.analytic - s.numeric).cwiseAbs().maxCoeff();
        report.samples.push_back(std::move(s));
        break;
      } catch (const MaterialError&) {
        if (attempt >= kMaxRedraws) throw;
      }
    }
  }
  return report;
}

void write_csv(const std::string& path, const Report& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "sample,rel_error,abs_error,passed\n";
  char buf[96];
  for (const auto& s : report.samples) {
    std::snprintf(buf, sizeof buf, "%d,%.10e,%.10e,%d\n", s.index, s.rel_error, s.abs_error,
                  s.rel_error <= report.tolerance ? 1 : 0);
    out << buf;
  }
}

std::string describe(const Sample& s, Regime regime) {
  std::ostringstream os;
  os.precision(10);
  const Eigen::IOFormat fmt(10, 0, " ", "\n", "  ", "");
  os << "sample " << s.index << ": relative error " << s.rel_error << ", max abs error "
     << s.abs_error << "\n";
  if (regime == Regime::FiniteStrain) {
    os << "F_old\n" << s.f_old.format(fmt) << "\nF_new\n" << s.f_new.format(fmt) << "\n";
  } else {
    os << "strain_old " << s.strain_old.vec().transpose().format(fmt) << "\nstrain_new "
       << s.strain_new.vec().transpose().format(fmt) << "\n";
  }
  os << "returned tangent\n" << s.analytic.format(fmt) << "\nfinite-difference tangent\n"
     << s.numeric.format(fmt) << "\n";
  return os.str();
}

}  // namespace constikit::tangent_check
