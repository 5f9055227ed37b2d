#include "qresponse/bath.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "qresponse/detail/parallel.hpp"
#include "qresponse/eig3.hpp"

namespace qresponse {

namespace {

constexpr double kWeightCutoff = 1e-12;
constexpr double kSkippedMassBudget = 1e-10;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out *= static_cast<double>(n - k + i) / i;
  return out;
}

// Batched evolution of one I0 group under the rotating quench at phi = 0.
// The Hamiltonian is real symmetric there, so states are stored as real
// column pairs [re, im] and every Taylor term costs one real GEMM.
class SectorGroupEvolver {
 public:
  SectorGroupEvolver(double d, double a, double i0, double v)
      : d_(d), v_(v), bdim_(static_cast<int>(std::round(2.0 * i0)) + 1),
        dim_(3 * bdim_) {
    const SpinOperators bath = spin_operators(i0);
    const SpinOperators nv = spin_operators(1.0);
    coupling_ = (a * (kron(nv.sx, bath.sx) + kron(nv.sy, bath.sy) +
                      kron(nv.sz, bath.sz)))
                    .real();
    const NvParams params{d_, 0.0};
    const ComplexMatrix h0 = hamiltonian_coupled(params, field_at(0.0), a, i0);
    const ComplexMatrix hf =
        hamiltonian_coupled(params, field_at(std::numbers::pi / v_), a, i0);
    hnorm_ = std::max(h0.cwiseAbs().rowwise().sum().maxCoeff(),
                      hf.cwiseAbs().rowwise().sum().maxCoeff());
  }

  int bath_dim() const { return bdim_; }
  double hnorm() const { return hnorm_; }

  // Columns: one per requested bath basis index (descending m0 order).
  // Returns the evolved complex states.
  ComplexMatrix evolve(const std::vector<int>& bath_indices,
                       const StepControl& control, const StateVector& nv_ground) {
    const double t_final = std::numbers::pi / v_;
    const int ncols = static_cast<int>(bath_indices.size());
    RealMatrix x0 = RealMatrix::Zero(dim_, 2 * ncols);
    for (int c = 0; c < ncols; ++c) {
      for (int s = 0; s < 3; ++s) {
        x0(s * bdim_ + bath_indices[c], 2 * c) = nv_ground(s).real();
      }
    }

    if (control.dt_fixed > 0.0) {
      const long n = std::max<long>(
          1, static_cast<long>(std::ceil(t_final / control.dt_fixed)));
      return to_complex(run(x0, t_final, n), ncols);
    }

    const double dt0 = control.dt_init > 0.0
                           ? control.dt_init
                           : std::min(0.01 / std::max(hnorm_, 1e-12), t_final / 1000.0);
    long n = std::max<long>(1, static_cast<long>(std::ceil(t_final / dt0)));
    RealMatrix prev = run(x0, t_final, n);
    for (;;) {
      if (n > 200'000'000L) {
        throw NumericError("sector evolution: step underflow before tolerance met");
      }
      n *= 2;
      RealMatrix cur = run(x0, t_final, n);
      if ((cur - prev).norm() < control.tol) return to_complex(cur, ncols);
      prev = std::move(cur);
    }
  }

 private:
  FieldVector field_at(double t) const {
    const double theta = v_ * v_ * t * t / (2.0 * std::numbers::pi);
    return FieldVector::spherical(1.0, theta, 0.0);
  }

  ComplexMatrix to_complex(const RealMatrix& x, int ncols) const {
    ComplexMatrix out(dim_, ncols);
    for (int c = 0; c < ncols; ++c) {
      out.col(c) = x.col(2 * c).cast<Complex>() +
                   Complex(0.0, 1.0) * x.col(2 * c + 1).cast<Complex>();
    }
    return out;
  }

  RealMatrix run(const RealMatrix& x0, double t_final, long nsteps) const {
    const double dt = t_final / static_cast<double>(nsteps);
    RealMatrix x = x0;
    RealMatrix term(x.rows(), x.cols()), hterm(x.rows(), x.cols());
    Eigen::Matrix3d h3t;
    for (long i = 0; i < nsteps; ++i) {
      const double t_mid = (static_cast<double>(i) + 0.5) * dt;
      const double theta = v_ * v_ * t_mid * t_mid / (2.0 * std::numbers::pi);
      const double s2 = std::sin(theta) / std::sqrt(2.0);
      const double c = std::cos(theta);
      h3t << d_ + c, s2, 0.0,
             s2, 0.0, s2,
             0.0, s2, d_ - c;  // symmetric, so equal to its transpose
      step(x, term, hterm, h3t, dt);
    }
    return x;
  }

  // x <- exp(-i H(theta_mid) dt) x, Taylor-summed to machine precision with
  // sub-splitting that keeps |H| dt below 1/2.
  void step(RealMatrix& x, RealMatrix& term, RealMatrix& hterm,
            const Eigen::Matrix3d& h3t, double dt) const {
    const int splits =
        std::max(1, static_cast<int>(std::ceil(hnorm_ * dt / 0.5)));
    const double h = dt / splits;
    const int rcols = static_cast<int>(x.cols());
    for (int s = 0; s < splits; ++s) {
      term = x;
      int small_terms = 0;
      for (int k = 1; k <= 100; ++k) {
        apply_h(term, hterm, h3t);
        // term <- (-i h / k) hterm, with columns stored as [re, im]
        const double f = h / static_cast<double>(k);
        for (int c = 0; c < rcols; c += 2) {
          term.col(c) = f * hterm.col(c + 1);
          term.col(c + 1) = -f * hterm.col(c);
        }
        x += term;
        if (term.norm() <= 3e-14 * x.norm()) {
          if (++small_terms == 2) break;
        } else {
          small_terms = 0;
        }
        if (k == 100) throw NumericError("sector evolution: series did not converge");
      }
    }
  }

  // out = (H3 kron 1 + coupling) in, column by real column.
  void apply_h(const RealMatrix& in, RealMatrix& out,
               const Eigen::Matrix3d& h3t) const {
    out.noalias() = coupling_ * in;
    for (int c = 0; c < in.cols(); ++c) {
      Eigen::Map<const RealMatrix> xm(in.col(c).data(), bdim_, 3);
      Eigen::Map<RealMatrix> ym(out.col(c).data(), bdim_, 3);
      ym.noalias() += xm * h3t;
    }
  }

  double d_;
  double v_;
  int bdim_;
  int dim_;
  double hnorm_ = 0.0;
  RealMatrix coupling_;
};

struct GroupTaskResult {
  std::vector<double> s_y;      // per column
  std::vector<double> norm_sq;  // per column
};

// Evolve every listed column of one I0 group and measure <Sy x 1>.
GroupTaskResult run_group(double d, double a, double i0, double v,
                          const std::vector<int>& bath_indices,
                          const StepControl& control) {
  const EigenSystem nv0 =
      eig3_exact(hamiltonian_spherical({d, 0.0}, 0.0, 0.0));
  SectorGroupEvolver evolver(d, a, i0, v);
  const ComplexMatrix states =
      evolver.evolve(bath_indices, control, nv0.vectors.col(0));

  const SpinOperators nv = spin_operators(1.0);
  const ComplexMatrix sy_full = kron(nv.sy, identity(evolver.bath_dim()));
  GroupTaskResult out;
  out.s_y.resize(bath_indices.size());
  out.norm_sq.resize(bath_indices.size());
  for (int c = 0; c < states.cols(); ++c) {
    const StateVector psi = states.col(c);
    out.s_y[c] = psi.dot(sy_full * psi).real();
    out.norm_sq[c] = psi.squaredNorm();
  }
  return out;
}

struct SectorPlan {
  double i0 = 0.0;
  std::vector<double> m0;           // descending
  std::vector<int> bath_indices;    // i0 - m0
  std::vector<std::size_t> sector;  // index into the full sector list
};

}  // namespace

std::vector<BathSector> bath_sectors(int n, double p) {
  if (n < 1) throw std::invalid_argument("bath_sectors: n must be >= 1");
  if (std::abs(p) > 1.0) throw std::invalid_argument("bath_sectors: |p| must be <= 1");
  std::vector<BathSector> out;
  const double half_n = n / 2.0;
  const double up = (1.0 + p) / 2.0, down = (1.0 - p) / 2.0;
  for (double i0 = (n % 2 == 0) ? 0.0 : 0.5; i0 <= half_n + 1e-9; i0 += 1.0) {
    const double multiplicity_factor =
        binomial(n, static_cast<int>(std::round(half_n - i0))) * (2.0 * i0 + 1.0) /
        (half_n + i0 + 1.0);
    for (double m0 = i0; m0 >= -i0 - 1e-9; m0 -= 1.0) {
      const double w = multiplicity_factor *
                       std::pow(up, half_n - m0) * std::pow(down, half_n + m0);
      out.push_back({i0, m0, w});
    }
  }
  return out;
}

MixedResponseResult mixed_response(const BathParams& bp, double d, double v,
                                   const StepControl& control, int threads) {
  const auto per_p = decoherence_sweep_multi(bp.n, bp.a, {bp.p}, d, {v},
                                             control.tol, threads, control);
  return per_p.at(0).at(0);
}

MixedResponseResult mixed_response(const BathParams& bp, double d, double v,
                                   double tol, int threads) {
  StepControl control;
  control.tol = tol;
  return mixed_response(bp, d, v, control, threads);
}

std::vector<MixedResponseResult> decoherence_sweep(
    const BathParams& bp, double d, const std::vector<double>& v_list,
    double tol, int threads) {
  return decoherence_sweep_multi(bp.n, bp.a, {bp.p}, d, v_list, tol, threads)
      .at(0);
}

std::vector<std::vector<MixedResponseResult>> decoherence_sweep_multi(
    int n, double a, const std::vector<double>& p_list, double d,
    const std::vector<double>& v_list, double tol, int threads,
    const StepControl& control_in) {
  for (double v : v_list) {
    if (!(v > 0.0)) throw std::invalid_argument("decoherence_sweep: v must be positive");
  }
  for (double p : p_list) {
    if (std::abs(p) > 1.0) throw std::invalid_argument("decoherence_sweep: |p| must be <= 1");
  }
  StepControl control = control_in;
  control.tol = tol;

  // Thermal sector lists per polarization (same (I0, M0) enumeration).
  std::vector<std::vector<BathSector>> sectors_per_p;
  for (double p : p_list) {
    sectors_per_p.push_back(n >= 1 ? bath_sectors(n, p)
                                   : std::vector<BathSector>{{0.0, 0.0, 1.0}});
  }

  // A sector may be skipped only when its weight is below the cutoff for
  // every requested polarization and the total skipped mass stays audited.
  const std::size_t nsectors = sectors_per_p.front().size();
  std::vector<bool> candidate_skip(nsectors, true);
  for (const auto& sectors : sectors_per_p) {
    for (std::size_t i = 0; i < nsectors; ++i) {
      if (sectors[i].weight >= kWeightCutoff) candidate_skip[i] = false;
    }
  }
  std::vector<double> skipped_mass(p_list.size(), 0.0);
  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    for (std::size_t i = 0; i < nsectors; ++i) {
      if (candidate_skip[i]) skipped_mass[pi] += sectors_per_p[pi][i].weight;
    }
  }
  const bool allow_skip = *std::max_element(skipped_mass.begin(), skipped_mass.end()) <
                          kSkippedMassBudget;
  if (!allow_skip) std::fill(skipped_mass.begin(), skipped_mass.end(), 0.0);

  // Group retained sectors by I0; all M0 columns of a group share H(t).
  std::vector<SectorPlan> plans;
  {
    std::map<double, SectorPlan> by_i0;
    const auto& ref = sectors_per_p.front();
    for (std::size_t i = 0; i < nsectors; ++i) {
      if (allow_skip && candidate_skip[i]) continue;
      SectorPlan& plan = by_i0[ref[i].i0];
      plan.i0 = ref[i].i0;
      plan.m0.push_back(ref[i].m0);
      plan.bath_indices.push_back(
          static_cast<int>(std::round(ref[i].i0 - ref[i].m0)));
      plan.sector.push_back(i);
    }
    for (auto& [i0, plan] : by_i0) plans.push_back(std::move(plan));
  }

  // One task per (v, group); fixed result slots keep the weighted reduction
  // deterministic regardless of the thread schedule.
  std::vector<std::vector<GroupTaskResult>> group_results(
      v_list.size(), std::vector<GroupTaskResult>(plans.size()));
  std::vector<std::pair<int, int>> tasks;
  for (std::size_t vi = 0; vi < v_list.size(); ++vi) {
    for (std::size_t gi = 0; gi < plans.size(); ++gi) {
      tasks.emplace_back(static_cast<int>(vi), static_cast<int>(gi));
    }
  }
  detail::parallel_for(static_cast<int>(tasks.size()), threads, [&](int ti) {
    const auto [vi, gi] = tasks[ti];
    const SectorPlan& plan = plans[gi];
    try {
      group_results[vi][gi] =
          run_group(d, a, plan.i0, v_list[vi], plan.bath_indices, control);
    } catch (const std::exception& err) {
      std::ostringstream msg;
      msg << "sector I0 = " << plan.i0 << " (v = " << v_list[vi]
          << "): " << err.what();
      throw NumericError(msg.str());
    }
  });

  std::vector<std::vector<MixedResponseResult>> out(
      p_list.size(), std::vector<MixedResponseResult>(v_list.size()));
  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    for (std::size_t vi = 0; vi < v_list.size(); ++vi) {
      MixedResponseResult& res = out[pi][vi];
      res.n = n;
      res.a = a;
      res.p = p_list[pi];
      res.v = v_list[vi];
      res.skipped_weight = skipped_mass[pi];
      for (std::size_t gi = 0; gi < plans.size(); ++gi) {
        const SectorPlan& plan = plans[gi];
        const GroupTaskResult& gr = group_results[vi][gi];
        for (std::size_t c = 0; c < plan.sector.size(); ++c) {
          const BathSector& sector = sectors_per_p[pi][plan.sector[c]];
          res.observable_value += sector.weight * gr.s_y[c];
          res.sectors.push_back({sector.i0, sector.m0, sector.weight,
                                 gr.s_y[c], gr.norm_sq[c]});
        }
      }
      res.retrieved_curvature = res.observable_value / res.v;
    }
  }
  return out;
}

}  // namespace qresponse
