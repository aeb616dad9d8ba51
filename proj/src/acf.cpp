#include "harnacklab/acf.hpp"

#include <limits>
#include <numeric>

#include "harnacklab/components.hpp"

namespace harnack {

ScalarField truncate_component(const ScalarField& phi, double level, std::size_t seed) {
  const Grid& g = phi.grid();
  if (!(phi[seed] > level)) throw Error("truncate_component: seed is not above the level");
  std::vector<std::uint8_t> flags(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) flags[i] = phi[i] > level ? 1 : 0;
  const Labeling lab = label_components(g, flags);
  const std::uint32_t keep = lab.labels[seed];
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (lab.labels[i] == keep) out[i] = phi[i] - level;
  }
  return {g, std::move(out), phi.role() == Role::state ? Role::state : Role::auxiliary};
}

double weighted_dirichlet(const ScalarField& psi, double r) {
  const Grid& g = psi.grid();
  const int d = g.dim();
  const double h = g.h();
  const double hd = std::pow(h, d);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index idx = g.multi_index(i);
    const Point xi = g.coords(i);
    for (int a = 0; a < d; ++a) {
      if (idx[static_cast<std::size_t>(a)] + 1 >= g.n()) continue;
      const std::size_t j = i + g.stride(a);
      const double diff = psi[j] - psi[i];
      if (diff == 0.0) continue;
      Point mid = xi;
      mid[static_cast<std::size_t>(a)] += 0.5 * h;
      const double m = norm(mid, d);
      if (!(m < r)) continue;
      const double kernel = d == 2 ? 1.0 : 1.0 / std::pow(std::max(m, h), d - 2);
      sum += (diff / h) * (diff / h) * kernel * hd;
    }
  }
  return sum;
}

std::vector<double> geometric_radii(double r_min, double r_max, int count) {
  if (count < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw Error("geometric_radii: bad range");
  std::vector<double> r(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) r[static_cast<std::size_t>(k)] = r_min * std::pow(r_max / r_min, double(k) / (count - 1));
  return r;
}

AcfProfile acf_phi(const ScalarField& psi1, const ScalarField& psi2, const std::vector<double>& radii) {
  const Grid& g = psi1.grid();
  if (!(psi2.grid() == g)) throw Error("acf_phi: fields live on different grids");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (psi1[i] != 0.0 && psi2[i] != 0.0) throw Error("acf_phi: supports overlap");
  }
  if (psi1[g.origin()] != 0.0 || psi2[g.origin()] != 0.0) throw Error("acf_phi: psi must vanish at the origin");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] < 4.0 * g.h() * (1.0 - 1e-12)) throw Error("acf_phi: radius below 4h");
    if (!(radii[k] < 1.0)) throw Error("acf_phi: radius must be below 1");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw Error("acf_phi: radii must increase");
  }
  AcfProfile p;
  p.radii = radii;
  for (double r : radii) {
    const double i1 = weighted_dirichlet(psi1, r);
    const double i2 = weighted_dirichlet(psi2, r);
    p.phi_values.push_back(i1 * i2 / std::pow(r, 4));
    std::size_t total = 0, zero = 0;
    const double half = 0.5 * g.h();
    g.for_each_in_ball({0.0, 0.0, 0.0}, r + half + 1e-12, [&](std::size_t j) {
      if (std::abs(g.norm(j) - r) > half) return;
      ++total;
      zero += (psi1[j] == 0.0 && psi2[j] == 0.0) ? 1 : 0;
    });
    p.alpha_values.push_back(total > 0 ? static_cast<double>(zero) / static_cast<double>(total) : 1.0);
  }
  p.monotone_defect = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    if (!(p.phi_values[k] > 0.0) || !(p.phi_values[k + 1] > 0.0)) {
      p.monotone_defect = std::numeric_limits<double>::quiet_NaN();
      break;
    }
    p.monotone_defect = std::max(p.monotone_defect, std::log(p.phi_values[k]) - std::log(p.phi_values[k + 1]));
  }
  return p;
}

MonotoneVerdict check_monotone(const AcfProfile& profile, double tol) {
  const std::size_t n = profile.radii.size();
  if (n < 3) throw Error("check_monotone: need at least 3 radii");
  for (double v : profile.phi_values) {
    if (!(v > 0.0)) throw Error("degenerate profile");
  }
  MonotoneVerdict out;
  std::vector<double> lr(n), lp(n);
  for (std::size_t k = 0; k < n; ++k) {
    lr[k] = std::log(profile.radii[k]);
    lp[k] = std::log(profile.phi_values[k]);
  }
  out.monotone_defect = -std::numeric_limits<double>::infinity();
  std::vector<double> growth, alpha;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    out.monotone_defect = std::max(out.monotone_defect, lp[k] - lp[k + 1]);
    growth.push_back((lp[k + 1] - lp[k]) / (lr[k + 1] - lr[k]));
    alpha.push_back(profile.alpha_values[k]);
  }
  out.pass = out.monotone_defect <= tol;

  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  const double mr = mean(lr), mp = mean(lp);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (lr[k] - mr) * (lp[k] - mp);
    sxx += (lr[k] - mr) * (lr[k] - mr);
  }
  out.log_slope = sxy / sxx;

  const double mg = mean(growth), ma = mean(alpha);
  double cga = 0.0, cgg = 0.0, caa = 0.0;
  for (std::size_t k = 0; k < growth.size(); ++k) {
    cga += (growth[k] - mg) * (alpha[k] - ma);
    cgg += (growth[k] - mg) * (growth[k] - mg);
    caa += (alpha[k] - ma) * (alpha[k] - ma);
  }
  out.growth_alpha_correlation =
      (cgg > 0.0 && caa > 0.0) ? cga / std::sqrt(cgg * caa) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace harnack
