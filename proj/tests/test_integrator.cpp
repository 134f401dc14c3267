#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "pann/integrator.hpp"

using namespace pann;
using ode::Vec;

namespace {

constexpr double kPi = 3.14159265358979323846;

void decay(double, const Vec<1>& y, Vec<1>& dy) { dy[0] = -y[0]; }

void drift(double, const Vec<2>&, Vec<2>& dy) {
  dy[0] = 1.0;
  dy[1] = 0.0;
}

void harmonic(double, const Vec<2>& y, Vec<2>& dy) {
  dy[0] = y[1];
  dy[1] = -y[0];
}

}  // namespace

TEST_CASE("exponential decay to 1e-9") {
  ode::Options<1> opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  const auto tr = ode::integrate<1>(decay, {1.0}, 0.0, 1.0, opt);
  REQUIRE(tr.status == ode::Status::Completed);
  CHECK(std::abs(tr.y_end[0] - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("linear crossing located to 1e-10") {
  std::vector<ode::EventSpec<2>> ev;
  ev.push_back({[](double, const Vec<2>& y) { return y[0]; }, 0});
  const auto tr = ode::integrate<2>(drift, {-1.0, 0.0}, 0.0, 3.0, {}, ev,
                                    ode::StopAtEvent{0, 1});
  REQUIRE(tr.status == ode::Status::EventStop);
  CHECK(std::abs(tr.t_end - 1.0) < 1e-10);
  CHECK(std::abs(tr.y_end[0]) < 1e-10);
}

TEST_CASE("harmonic oscillator: third positive-direction zero of y1") {
  // y = (cos t, -sin t); cos t = 0 with positive slope at 3pi/2 + 2pi k.
  std::vector<ode::EventSpec<2>> ev;
  ev.push_back({[](double, const Vec<2>& y) { return y[0]; }, +1});
  ode::Options<2> opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-13;
  const auto tr = ode::integrate<2>(harmonic, {1.0, 0.0}, 0.0, 40.0, opt, ev,
                                    ode::StopAtEvent{0, 3});
  REQUIRE(tr.status == ode::Status::EventStop);
  CHECK(std::abs(tr.t_end - 11.0 * kPi / 2.0) < 1e-8);
}

TEST_CASE("event residuals below 1e-10 (1+|state|)") {
  std::vector<ode::EventSpec<2>> ev;
  ev.push_back({[](double, const Vec<2>& y) { return y[0]; }, 0});
  ode::Options<2> opt;
  const auto tr = ode::integrate<2>(harmonic, {1.0, 0.0}, 0.0, 50.0, opt, ev);
  REQUIRE(tr.status == ode::Status::Completed);
  REQUIRE(tr.events.size() >= 15);
  for (const auto& e : tr.events) {
    const double norm = std::hypot(e.y[0], e.y[1]);
    CHECK(std::abs(e.y[0]) <= 1e-10 * (1.0 + norm));
  }
}

TEST_CASE("dense output matches endpoints to 1e-13") {
  ode::Options<2> opt;
  const auto tr = ode::integrate<2>(harmonic, {1.0, 0.0}, 0.0, 10.0, opt);
  REQUIRE(tr.status == ode::Status::Completed);
  for (std::size_t k = 1; k < tr.steps.size(); ++k) {
    const auto end_prev = tr.steps[k - 1].eval(1.0);
    const auto beg_next = tr.steps[k].eval(0.0);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(end_prev[i] - beg_next[i]) <= 1e-13);
    }
  }
}

TEST_CASE("bitwise determinism") {
  auto run = [] {
    ode::Options<2> opt;
    return ode::integrate<2>(harmonic, {1.0, 0.0}, 0.0, 25.0, opt);
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.steps.size() == b.steps.size());
  CHECK(std::memcmp(&a.y_end, &b.y_end, sizeof(a.y_end)) == 0);
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    CHECK(std::memcmp(&a.steps[k].c, &b.steps[k].c, sizeof(a.steps[k].c)) == 0);
  }
}

TEST_CASE("grazing root is flagged tangential") {
  // cos t - 1 touches zero at t = 2pi without sign change.
  std::vector<ode::EventSpec<2>> ev;
  ev.push_back({[](double, const Vec<2>& y) { return y[0] - 1.0; }, 0});
  ode::Options<2> opt;
  const auto tr = ode::integrate<2>(harmonic, {1.0, 0.0}, 0.0, 7.0, opt, ev);
  REQUIRE(tr.status == ode::Status::Completed);
  for (const auto& e : tr.events) CHECK(e.tangential);
}

TEST_CASE("empirical order near 5") {
  SUBCASE("decay") {
    auto exact = [](double t) { return Vec<1>{std::exp(-t)}; };
    const double p = ode::order_check<1>(decay, {1.0}, 0.0, 2.0,
                                         std::function<Vec<1>(double)>(exact));
    CHECK(p > 4.5);
    CHECK(p < 5.5);
  }
  SUBCASE("forced cosine") {
    // coarse base step keeps the error cascade above the roundoff floor
    auto f = [](double t, const Vec<1>&, Vec<1>& dy) { dy[0] = std::cos(t); };
    auto exact = [](double t) { return Vec<1>{std::sin(t)}; };
    const double p = ode::order_check<1>(
        f, {0.0}, 0.0, 12.0, std::function<Vec<1>(double)>(exact), 1.0);
    CHECK(p > 4.5);
    CHECK(p < 5.5);
  }
}

TEST_CASE("max-steps budget is reported") {
  ode::Options<2> opt;
  opt.max_steps = 3;
  const auto tr = ode::integrate<2>(harmonic, {1.0, 0.0}, 0.0, 50.0, opt);
  CHECK(tr.status == ode::Status::MaxStepsExceeded);
  CHECK(tr.t_end < 50.0);
}

TEST_CASE("positivity guard blocks sign flips") {
  // y' = -100 with y(0) = 1 crosses zero; the guard must stop the run
  // rather than let the state go negative.
  auto f = [](double, const Vec<1>&, Vec<1>& dy) { dy[0] = -100.0; };
  ode::Options<1> opt;
  opt.positive = {true};
  const auto tr = ode::integrate<1>(f, {1.0}, 0.0, 1.0, opt);
  CHECK(tr.status == ode::Status::StepSizeUnderflow);
  CHECK(tr.y_end[0] >= 0.0);
}

TEST_CASE("stop policy counts only matching direction") {
  std::vector<ode::EventSpec<2>> ev;
  ev.push_back({[](double, const Vec<2>& y) { return y[0]; }, -1});
  const auto tr = ode::integrate<2>(harmonic, {1.0, 0.0}, 0.0, 40.0, {}, ev,
                                    ode::StopAtEvent{0, 2});
  REQUIRE(tr.status == ode::Status::EventStop);
  // cos t decreasing zeros: pi/2, 5pi/2.
  CHECK(std::abs(tr.t_end - 5.0 * kPi / 2.0) < 1e-8);
}
