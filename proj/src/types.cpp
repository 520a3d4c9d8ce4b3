#include "sirflock/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sirflock/errors.hpp"

namespace sirflock {

CollisionError::CollisionError(std::size_t i, std::size_t j, double distance, double time)
    : Error([&] {
          std::ostringstream os;
          os << "collision between particles " << i << " and " << j << " (distance " << distance << ")";
          if (!std::isnan(time)) os << " at t = " << time;
          return os.str();
      }()),
      first_(i), second_(j), distance_(distance), time_(time) {}

DriftError::DriftError(std::size_t particle, double magnitude, double time)
    : Error([&] {
          std::ostringstream os;
          os << "simplex drift " << magnitude << " on particle " << particle << " at t = " << time;
          return os.str();
      }()),
      particle_(particle), magnitude_(magnitude), time_(time) {}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : Error(line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message),
      line_(line) {}

bool on_simplex(const EpidemicState& w, double sum_tol, double neg_tol) noexcept {
    if (!std::isfinite(w.s) || !std::isfinite(w.i) || !std::isfinite(w.r)) return false;
    if (w.s < -neg_tol || w.i < -neg_tol || w.r < -neg_tol) return false;
    return std::abs(w.total() - 1.0) <= sum_tol;
}

double ModelParams::min_recovery() const {
    if (recovery.empty()) throw ValidationError("recovery vector is empty");
    return *std::min_element(recovery.begin(), recovery.end());
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

} // namespace

void validate(const ModelParams& p) {
    require(p.n >= 1, "particle count n must be >= 1");
    require(p.d >= 1, "spatial dimension d must be >= 1");
    require(std::isfinite(p.kappa1) && p.kappa1 >= 0.0, "kappa1 must be finite and >= 0");
    require(std::isfinite(p.kappa2) && p.kappa2 >= 0.0, "kappa2 must be finite and >= 0");
    require(std::isfinite(p.kappa3) && p.kappa3 >= 0.0, "kappa3 must be finite and >= 0");
    require(std::isfinite(p.alpha) && p.alpha >= 1.0, "exponent ordering 1 <= alpha < beta violated: alpha < 1");
    require(std::isfinite(p.beta) && p.alpha < p.beta, "exponent ordering 1 <= alpha < beta violated: alpha >= beta");
    require(std::isfinite(p.gamma_exp) && p.gamma_exp >= 0.0, "adjacency exponent gamma must be >= 0");
    require(std::isfinite(p.l_offset) && p.l_offset > 0.0, "adjacency offset L must be > 0");
    require(std::isfinite(p.eps_a) && p.eps_a > 0.0, "attraction floor eps_a must be > 0");
    require(std::isfinite(p.eps_r) && p.eps_r > 0.0, "repulsion floor eps_r must be > 0");
    require(p.recovery.size() == p.n, "recovery vector length must equal n");
    require(std::all_of(p.recovery.begin(), p.recovery.end(), [](double b) { return std::isfinite(b) && b > 0.0; }),
            "recovery rates must be > 0");
    require(p.symptom.size() == p.n, "symptom vector length must equal n");
    require(std::all_of(p.symptom.begin(), p.symptom.end(), [](double s) { return s >= 0.0 && s <= 1.0; }),
            "symptom entries must lie in [0, 1]");
    require(p.confirm_threshold >= 0.0 && p.confirm_threshold <= 1.0, "confirm_threshold must lie in [0, 1]");
}

ModelParams uniform_params(std::size_t n, std::size_t d, double recovery, double symptom) {
    ModelParams p;
    p.n = n;
    p.d = d;
    p.recovery.assign(n, recovery);
    p.symptom.assign(n, symptom);
    return p;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

void validate(const Ensemble& e, const ModelParams& p, double collision_tol) {
    require(e.size() == p.n, "ensemble size must equal n");
    require(e.dim == p.d, "ensemble dimension must equal d");
    require(e.coords.size() == e.size() * e.dim, "coordinate buffer must hold n * d values");
    for (const auto& w : e.states) require(on_simplex(w), "epidemic state off the probability simplex");
    for (double c : e.coords) require(std::isfinite(c), "position coordinates must be finite");
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            const double r = distance(e.position(i), e.position(j));
            if (r < collision_tol) throw CollisionError(i, j, r);
        }
    }
}

} // namespace sirflock
