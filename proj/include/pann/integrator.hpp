#pragma once

// Adaptive Dormand-Prince 5(4) integration with free 4th-order dense output
// and root-resolved event location on the interpolant.
//
// The stepper is templated on the right-hand side and on the (compile-time)
// state dimension, keeps no global state, and is bitwise deterministic for
// identical inputs on one platform.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pann::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

enum class Status {
  Completed,          // reached end of requested span
  EventStop,          // stop policy triggered
  StepSizeUnderflow,  // blow-up, stiffness, or domain-guard deadlock
  MaxStepsExceeded,
};

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Completed: return "completed";
    case Status::EventStop: return "event-stop";
    case Status::StepSizeUnderflow: return "step-size-underflow";
    case Status::MaxStepsExceeded: return "max-steps-exceeded";
  }
  return "unknown";
}

// One accepted step together with the dense-output coefficients.
// Interpolation uses the standard DOPRI5 quartic polynomial in
// theta = (t - t0) / h.
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> c{};  // rcont1..rcont5

  Vec<N> eval(double theta) const {
    const double th1 = 1.0 - theta;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = c[0][i] +
             theta * (c[1][i] + th1 * (c[2][i] + theta * (c[3][i] + th1 * c[4][i])));
    }
    return y;
  }

  Vec<N> y_begin() const { return eval(0.0); }
  Vec<N> y_end() const { return eval(1.0); }
};

template <std::size_t N>
struct EventSpec {
  std::function<double(double, const Vec<N>&)> g;
  int direction = 0;  // +1: minus-to-plus only, -1: plus-to-minus, 0: both
};

template <std::size_t N>
struct EventRecord {
  std::size_t id = 0;
  double t = 0.0;
  Vec<N> y{};
  int direction = 0;       // sign change of g across the root
  bool tangential = false; // |dg/dt| below threshold at the root
};

struct StopAtEvent {
  std::size_t event_id = 0;
  std::size_t occurrence = 1;  // stop at the n-th non-tangential matching root
};

template <std::size_t N>
struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::optional<Vec<N>> atol_by_component;  // overrides atol when set
  double h_init = 0.0;                      // 0 = automatic selection
  double h_max = 0.0;                       // 0 = whole span
  std::size_t max_steps = 2'000'000;
  bool keep_dense = true;  // store all steps (events only need the live step)
  // Domain guards: reject steps that take a flagged component negative
  // (resp. above one). Needed near s = 0 where the model's relaxation phases
  // dive to denormal scales and a sign flip would be dynamically unstable,
  // and for fraction variables confined to [0, 1].
  std::array<bool, N> positive{};
  std::array<bool, N> le_one{};
  double tangent_eps = 1e-9;  // |dg/dt| below this flags a grazing root
};

template <std::size_t N>
struct Trajectory {
  Status status = Status::Completed;
  std::string message;
  double t0 = 0.0;
  double t_end = 0.0;
  Vec<N> y0{};
  Vec<N> y_end{};
  std::vector<DenseStep<N>> steps;
  std::vector<EventRecord<N>> events;
  std::size_t n_accepted = 0;
  std::size_t n_rejected = 0;
  std::size_t n_field_evals = 0;

  // Dense evaluation; t clamped to the covered range.
  Vec<N> state_at(double t) const {
    if (steps.empty()) return y0;
    if (t <= steps.front().t0) return steps.front().y_begin();
    const auto& last = steps.back();
    if (t >= last.t0 + last.h) return last.y_end();
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (steps[mid].t0 <= t)
        lo = mid;
      else
        hi = mid - 1;
    }
    return steps[lo].eval((t - steps[lo].t0) / steps[lo].h);
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights (Hairer, Norsett, Wanner).
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
double error_norm(const Vec<N>& err, const Vec<N>& y0, const Vec<N>& y1,
                  const Options<N>& opt) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double atol_i =
        opt.atol_by_component ? (*opt.atol_by_component)[i] : opt.atol;
    const double sc =
        atol_i + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(N));
}

}  // namespace detail

// Root refinement on a scalar function of theta over a bracketing interval.
// Bisection with inverse-quadratic acceleration; robust near grazing roots.
template <class G>
double refine_root(G&& g, double ta, double tb, double ga, double gb,
                   double tol) {
  if (ga == 0.0) return ta;
  if (gb == 0.0) return tb;
  double a = ta, b = tb, fa = ga, fb = gb;
  double c = a, fc = fa;  // previous bracket endpoint, for acceleration
  for (int it = 0; it < 100 && (b - a) > tol; ++it) {
    double cand;
    if (fa != fc && fb != fc && fa != fb) {
      // inverse quadratic interpolation
      cand = a * fb * fc / ((fa - fb) * (fa - fc)) +
             b * fa * fc / ((fb - fa) * (fb - fc)) +
             c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      cand = b - fb * (b - a) / (fb - fa);
    }
    const double mid = 0.5 * (a + b);
    if (!(cand > a && cand < b)) cand = mid;
    // keep at least bisection progress every other iteration
    if (it % 2 == 1) cand = mid;
    const double fcand = g(cand);
    if (fcand == 0.0) return cand;
    if ((fcand < 0.0) == (fa < 0.0)) {
      c = a;
      fc = fa;
      a = cand;
      fa = fcand;
    } else {
      c = b;
      fc = fb;
      b = cand;
      fb = fcand;
    }
  }
  return 0.5 * (a + b);
}

template <std::size_t N, class Field>
Trajectory<N> integrate(Field&& field, const Vec<N>& y_start, double t_begin,
                        double t_final, const Options<N>& opt = {},
                        const std::vector<EventSpec<N>>& events = {},
                        std::optional<StopAtEvent> stop = std::nullopt) {
  Trajectory<N> tr;
  tr.t0 = t_begin;
  tr.y0 = y_start;
  tr.t_end = t_begin;
  tr.y_end = y_start;

  const double span = t_final - t_begin;
  if (span <= 0.0) {
    tr.status = Status::Completed;
    return tr;
  }
  const double hmax = (opt.h_max > 0.0) ? opt.h_max : span;

  auto f = [&](double t, const Vec<N>& y, Vec<N>& dy) {
    field(t, y, dy);
    ++tr.n_field_evals;
  };

  Vec<N> y = y_start;
  double t = t_begin;
  Vec<N> k1;
  f(t, y, k1);

  // Event bookkeeping: previous sign per event. A start exactly on an event
  // surface takes the sign of the outgoing derivative so the departure does
  // not register as a crossing, while a genuine return still does.
  std::vector<double> g_prev(events.size());
  std::vector<std::size_t> hit_count(events.size(), 0);
  {
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double g0 = events[i].g(t, y);
      if (std::abs(g0) < 1e-12) {
        const double dt = 1e-9 * std::max(1.0, std::abs(t));
        Vec<N> yp;
        for (std::size_t j = 0; j < N; ++j) yp[j] = y[j] + dt * k1[j];
        const double g1 = events[i].g(t + dt, yp);
        g_prev[i] = (g1 != 0.0) ? g1 : g0;
      } else {
        g_prev[i] = g0;
      }
    }
  }

  // Initial step size (standard startup estimate when not provided).
  double h = opt.h_init;
  if (h <= 0.0) {
    double d0 = 0.0;
    double d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double atol_i =
          opt.atol_by_component ? (*opt.atol_by_component)[i] : opt.atol;
      const double sc = atol_i + opt.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, hmax);
    Vec<N> y1, k2;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h0 * k1[i];
    f(t + h0, y1, k2);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double atol_i =
          opt.atol_by_component ? (*opt.atol_by_component)[i] : opt.atol;
      const double sc = atol_i + opt.rtol * std::abs(y[i]);
      const double q = (k2[i] - k1[i]) / sc;
      d2 += q * q;
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(d1, d2);
    double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / dm, 0.2);
    h = std::min({100.0 * h0, h1, hmax});
  }
  h = std::min(h, hmax);

  bool just_rejected = false;
  Vec<N> k2, k3, k4, k5, k6, k7, ytmp, ynew, err;

  while (tr.n_accepted + tr.n_rejected < opt.max_steps) {
    if (t >= t_final) break;
    const double h_floor = 1e-14 * std::max(1.0, std::abs(t));
    if (h < h_floor) {
      tr.status = Status::StepSizeUnderflow;
      tr.message = "step size underflow at t=" + std::to_string(t);
      tr.t_end = t;
      tr.y_end = y;
      return tr;
    }
    bool last = false;
    if (t + h >= t_final) {
      h = t_final - t;
      last = true;
    }

    using namespace detail;
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    f(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    f(t + h, ynew, k7);  // FSAL
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                    e6 * k6[i] + e7 * k7[i]);

    const double en = detail::error_norm<N>(err, y, ynew, opt);

    bool guard_ok = true;
    if (en <= 1.0) {
      for (std::size_t i = 0; i < N; ++i) {
        if ((opt.positive[i] && ynew[i] < 0.0) ||
            (opt.le_one[i] && ynew[i] > 1.0)) {
          guard_ok = false;
          break;
        }
      }
    }

    if (en > 1.0 || !guard_ok) {
      ++tr.n_rejected;
      double fac = guard_ok ? std::max(0.1, 0.9 * std::pow(en, -0.2)) : 0.5;
      fac = std::min(fac, 0.9);
      h *= fac;
      just_rejected = true;
      continue;
    }

    // Accepted: build dense coefficients.
    DenseStep<N> ds;
    ds.t0 = t;
    ds.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      ds.c[0][i] = y[i];
      ds.c[1][i] = ydiff;
      ds.c[2][i] = bspl;
      ds.c[3][i] = ydiff - h * k7[i] - bspl;
      ds.c[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                        d6 * k6[i] + d7 * k7[i]);
    }

    // Event scan on the interpolant: endpoint plus interior probes so that
    // paired crossings inside one step are still caught.
    struct Hit {
      double theta;
      std::size_t id;
      int dir;
      bool tangential;
    };
    std::vector<Hit> hits;
    for (std::size_t ie = 0; ie < events.size(); ++ie) {
      const auto& ev = events[ie];
      constexpr std::array<double, 4> probes{0.25, 0.5, 0.75, 1.0};
      double th_a = 0.0;
      double g_a = g_prev[ie];
      for (double th_b : probes) {
        const Vec<N> yb = ds.eval(th_b);
        const double g_b = ev.g(t + th_b * h, yb);
        if ((g_a < 0.0 && g_b > 0.0) || (g_a > 0.0 && g_b < 0.0) ||
            (g_a == 0.0 && g_b != 0.0 && th_a > 0.0)) {
          const int dir = (g_b > g_a) ? +1 : -1;
          if (ev.direction == 0 || ev.direction == dir) {
            auto gtheta = [&](double th) { return ev.g(t + th * h, ds.eval(th)); };
            const double tol_th = 1e-12 * std::max(1.0, std::abs(t) + std::abs(h)) / std::abs(h);
            const double th_root =
                refine_root(gtheta, th_a, th_b, g_a, g_b, std::max(tol_th, 1e-15));
            hits.push_back({th_root, ie, dir, false});
          }
        }
        th_a = th_b;
        g_a = g_b;
      }
      g_prev[ie] = g_a;
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.theta < b.theta; });

    bool stopped = false;
    double t_stop = 0.0;
    Vec<N> y_stop{};
    for (auto& hit : hits) {
      double t_ev = t + hit.theta * h;
      Vec<N> y_ev = ds.eval(hit.theta);
      // Flow-Newton polish: slide along the field to cut the residual.
      double gdot = 0.0;
      {
        Vec<N> fe;
        f(t_ev, y_ev, fe);
        const double d = 1e-8 * std::max(1.0, std::abs(t_ev));
        Vec<N> yp;
        for (std::size_t j = 0; j < N; ++j) yp[j] = y_ev[j] + d * fe[j];
        const double g0 = events[hit.id].g(t_ev, y_ev);
        const double g1 = events[hit.id].g(t_ev + d, yp);
        gdot = (g1 - g0) / d;
        if (std::abs(gdot) > 0.0) {
          double dt_corr = -g0 / gdot;
          if (std::abs(dt_corr) < 0.1 * std::abs(h)) {
            for (std::size_t j = 0; j < N; ++j) y_ev[j] += dt_corr * fe[j];
            t_ev += dt_corr;
          }
        }
      }
      hit.tangential = std::abs(gdot) < opt.tangent_eps;

      EventRecord<N> rec;
      rec.id = hit.id;
      rec.t = t_ev;
      rec.y = y_ev;
      rec.direction = hit.dir;
      rec.tangential = hit.tangential;
      tr.events.push_back(rec);
      if (!hit.tangential) ++hit_count[hit.id];

      if (stop && stop->event_id == hit.id && !hit.tangential &&
          hit_count[hit.id] >= stop->occurrence) {
        stopped = true;
        t_stop = t_ev;
        y_stop = y_ev;
        break;
      }
    }

    ++tr.n_accepted;
    if (opt.keep_dense) tr.steps.push_back(ds);

    if (stopped) {
      tr.status = Status::EventStop;
      tr.t_end = t_stop;
      tr.y_end = y_stop;
      return tr;
    }

    t += h;
    y = ynew;
    k1 = k7;
    tr.t_end = t;
    tr.y_end = y;

    if (last && t >= t_final) {
      tr.status = Status::Completed;
      return tr;
    }

    double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
    fac = std::min(fac, just_rejected ? 1.0 : 5.0);
    fac = std::max(fac, 0.2);
    just_rejected = false;
    h = std::min(h * fac, hmax);
  }

  if (t < t_final) {
    tr.status = Status::MaxStepsExceeded;
    tr.message = "max steps exceeded at t=" + std::to_string(t);
  }
  tr.t_end = t;
  tr.y_end = y;
  return tr;
}

// Fixed-step driver (no error control, no events); used for order checks.
template <std::size_t N, class Field>
Vec<N> integrate_fixed(Field&& field, Vec<N> y, double t0, double t1,
                       double h_req) {
  using namespace detail;
  const double span = t1 - t0;
  const auto n = static_cast<std::size_t>(std::ceil(span / h_req - 1e-12));
  const double h = span / static_cast<double>(std::max<std::size_t>(n, 1));
  Vec<N> k1, k2, k3, k4, k5, k6, ytmp;
  double t = t0;
  for (std::size_t step = 0; step < std::max<std::size_t>(n, 1); ++step) {
    field(t, y, k1);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    field(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    field(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    field(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    field(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    field(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                         b6 * k6[i]);
    t += h;
  }
  return y;
}

// Empirical convergence order by step halving against an exact solution
// (or against the finest grid when no exact solution is supplied).
template <std::size_t N, class Field>
double order_check(Field&& field, const Vec<N>& y0, double t0, double t1,
                   std::optional<std::function<Vec<N>(double)>> exact =
                       std::nullopt,
                   double h_base = 0.0, int levels = 4) {
  if (h_base <= 0.0) h_base = (t1 - t0) / 64.0;
  std::vector<Vec<N>> results;
  double h = h_base;
  for (int l = 0; l < levels + (exact ? 0 : 1); ++l) {
    results.push_back(integrate_fixed<N>(field, y0, t0, t1, h));
    h *= 0.5;
  }
  auto norm_diff = [](const Vec<N>& a, const Vec<N>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  std::vector<double> errs;
  if (exact) {
    const Vec<N> ref = (*exact)(t1);
    for (const auto& r : results) errs.push_back(norm_diff(r, ref));
  } else {
    const Vec<N> ref = results.back();
    for (std::size_t i = 0; i + 1 < results.size(); ++i)
      errs.push_back(norm_diff(results[i], ref));
  }
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    if (errs[i] > 0.0 && errs[i + 1] > 0.0)
      orders.push_back(std::log2(errs[i] / errs[i + 1]));
  }
  if (orders.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(orders.begin(), orders.end());
  return orders[orders.size() / 2];
}

}  // namespace pann::ode
