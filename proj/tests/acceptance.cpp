// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "deblur/cli/generators.hpp"
#include "deblur/cli/io.hpp"
#include "deblur/kernel.hpp"
#include "deblur/latent.hpp"
#include "deblur/metrics.hpp"
#include "deblur/pipeline.hpp"
#include "deblur/prox.hpp"
#include "deblur/transforms.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace deblur;
using namespace deblur::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

bool report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool pass = out.ok && in_time;
  std::printf("[%s] %d %-28s %7.2fs", pass ? "PASS" : "FAIL", id, name, secs);
  if (limit_s > 0.0) std::printf(" (limit %.0fs)", limit_s);
  std::printf("  %s%s\n", out.detail.c_str(), in_time ? "" : " [time limit exceeded]");
  std::fflush(stdout);
  return pass;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Tight frame: synthesis(analysis(x)) == x, and the squared symbols sum to one.
Outcome tight_frame() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Image x = random_image(64, 64, 1000 + seed, -1.0, 1.0);
    worst = std::max(worst, max_abs_diff(framelet_synthesis(framelet_analysis(x)), x));
  }
  // Symbols evaluated two ways: the library's and the filter taps' own DTFT.
  const Size2 shape{64, 64};
  const auto& h = framelet_filters();
  std::vector<double> lib(64 * 64, 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Spectrum s = framelet_symbol(i, j, shape);
      for (std::size_t n = 0; n < lib.size(); ++n) lib[n] += std::norm(s.values()[n]);
    }
  }
  auto dtft = [&](int f, int k, int n) {
    std::complex<double> acc;
    for (int a = -1; a <= 1; ++a) {
      acc += h[static_cast<std::size_t>(f)][static_cast<std::size_t>(a + 1)] *
             std::polar(1.0, -2.0 * std::acos(-1.0) * a * k / n);
    }
    return std::norm(acc);
  };
  double sym_err = 0.0;
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      double direct = 0.0;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) direct += dtft(i, r, 64) * dtft(j, c, 64);
      }
      sym_err = std::max(sym_err, std::abs(direct - 1.0));
      sym_err = std::max(sym_err, std::abs(lib[static_cast<std::size_t>(r * 64 + c)] - 1.0));
    }
  }
  return {worst < 1e-10 && sym_err < 1e-12,
          fmt("reconstruction %.2e (< 1e-10), symbol sum %.2e (< 1e-12)", worst, sym_err)};
}

// Minimum of |x| + (a/2)(v - x)^2 over a 1e-4 grid covering the minimizer.
std::pair<double, double> envelope_grid(double v, double a) {
  const double lo = -std::abs(v) - 1.0;
  const double hi = std::abs(v) + 1.0;
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  const long n = static_cast<long>(std::ceil((hi - lo) / 1e-4));
  for (long i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    const double f = std::abs(x) + 0.5 * a * (v - x) * (v - x);
    if (f < best) {
      best = f;
      arg = x;
    }
  }
  return {best, arg};
}

Outcome moreau_oracles() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> vdist(-3.0, 3.0);
  std::uniform_real_distribution<double> adist(0.5, 5.0);
  double env_err = 0.0;
  double mcp_err = 0.0;
  double prox_err = 0.0;
  double grad_err = 0.0;
  int fd_points = 0;
  for (int n = 0; n < 1000; ++n) {
    const double v = vdist(rng);
    const double a = adist(rng);
    const auto [min_value, argmin] = envelope_grid(v, a);
    env_err = std::max(env_err, std::abs(moreau_env_l1(v, a) - min_value));
    mcp_err = std::max(mcp_err, std::abs(mcp_value(v, a) - (std::abs(v) - min_value)));
    prox_err = std::max(prox_err, std::abs(soft_threshold(v, 1.0 / a) - argmin));
    // The gradient clamp(a v, -1, 1) has kinks at |v| = 1/a.
    const double h = 1e-6;
    if (std::abs(std::abs(v) - 1.0 / a) > 1e-3) {
      const double fd = (moreau_env_l1(v + h, a) - moreau_env_l1(v - h, a)) / (2.0 * h);
      grad_err = std::max(grad_err, std::abs(grad_moreau_env_l1(v, a) - fd));
      ++fd_points;
    }
  }
  const bool ok = env_err < 1e-3 && mcp_err < 1e-3 && prox_err < 1e-3 && grad_err < 1e-4;
  return {ok, fmt("grid: envelope %.1e mcp %.1e prox %.1e (< 1e-3)", env_err, mcp_err, prox_err) +
                  fmt(", FD gradient %.1e (< 1e-4) on %.0f points", grad_err, fd_points)};
}

Outcome fbs_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> target(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  bool monotone = true;
  for (int inst = 0; inst < 200; ++inst) {
    FbsParams p;
    p.lambda = 0.2 + 1.8 * unit(rng);
    p.sigma = 0.5 + unit(rng);
    p.beta = 0.5 + 3.0 * unit(rng);
    p.alpha = (0.05 + 0.9 * unit(rng)) * 2.0 * p.beta / (p.lambda * p.sigma);
    p.tau = fbs_step_size(fbs_lipschitz(p.beta, p.lambda, p.sigma, p.alpha), 1e-6);
    p.max_iters = 5000;
    p.tol = 1e-13;
    std::vector<double> c(8);
    for (double& v : c) v = target(rng);
    const std::vector<double> u0(c.size(), 0.0);
    double prev = mcp_prox_objective(c, u0, p);
    const FbsResult r = fbs_mcp_prox(c, u0, p, [&](int, std::span<const double> u) {
      const double obj = mcp_prox_objective(c, u, p);
      monotone = monotone && obj <= prev + 1e-12 * (1.0 + std::abs(prev));
      prev = obj;
    });
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double oracle = mcp_prox_oracle_1d(c[i], p.lambda * p.sigma, p.beta, p.alpha);
      worst = std::max(worst, std::abs(r.u[i] - oracle));
    }
  }
  return {worst < 1e-3 && monotone,
          fmt("max |u - oracle| %.2e (< 1e-3), objective monotone: ", worst) + (monotone ? "yes" : "no")};
}

Outcome stationarity() {
  double x_worst = 0.0;
  double k_worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Image y = random_image(32, 32, 300 + seed);
    const Kernel k = random_kernel(7, 310 + seed);
    const GradientField g = random_gradient(32, 32, 320 + seed);
    const FrameletCoeffs u = random_coeffs(32, 32, 330 + seed);
    const double gamma = 0.005 * (1 + seed);
    const double mu = 0.3 + seed;
    const double beta = 0.5 + 2.0 * seed;
    const Image x = update_x(y, FreqCache(k, y.shape()), g, u, gamma, mu, beta);
    const Image res = x_stationarity(x, y, k, g, u, gamma, mu, beta);
    Image rhs = direct_convolve_adjoint(y, k) + mu * direct_gradient_adjoint(g) + beta * direct_synthesis(u);
    x_worst = std::max(x_worst, norm2(res.values()) / norm2(rhs.values()));

    const GradientField gx = gradient(random_image(32, 32, 340 + seed));
    const GradientField gy = gradient(random_image(32, 32, 350 + seed));
    const GradientField q = random_gradient(32, 32, 360 + seed);
    const double nu = 0.01 * (1 + seed);
    const double xi = 0.1 + seed;
    const Image field = solve_kernel_field(gx, gy, q, nu, xi);
    const Image kres = k_stationarity(field, gx, gy, q, nu, xi);
    const Image krhs = direct_circular_adjoint(gx.dx, gy.dx) + direct_circular_adjoint(gx.dy, gy.dy) +
                       xi * direct_gradient_adjoint(q);
    k_worst = std::max(k_worst, norm2(kres.values()) / norm2(krhs.values()));
  }
  return {x_worst < 1e-8 && k_worst < 1e-8,
          fmt("relative residual: x-solve %.2e, k-solve %.2e (< 1e-8)", x_worst, k_worst)};
}

// Phi_alpha(x) = ||Kx - y||^2 + gamma||x||^2 + lambda sigma ||Wx||_MCP.
Outcome convexity_witness() {
  const double lambda = 1.0;
  const double sigma = 1.0;
  const double alpha = 2.0;
  const double gamma_bound = lambda * sigma * alpha / 2.0;
  const GradientField no_tv{Image(16, 16), Image(16, 16)};

  double worst_gap = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Kernel k = random_kernel(3, 500 + seed);
    const Image y = random_image(16, 16, 600 + seed);
    const FreqCache cache(k, y.shape());
    const Image a = random_image(16, 16, 700 + seed, -0.5, 0.5);
    const Image b = random_image(16, 16, 800 + seed, -0.5, 0.5);
    auto phi = [&](const Image& x) { return latent_energy(x, y, cache, gamma_bound, lambda, sigma, alpha, no_tv); };
    worst_gap = std::max(worst_gap, phi(0.5 * (a + b)) - 0.5 * (phi(a) + phi(b)));
  }

  // Below the bound the MCP curvature -lambda sigma alpha wins along directions
  // the blur nearly annihilates. Candidates: a midpoint whose framelet
  // coefficients are all nonzero and inside the concave range, moved along
  // the checkerboard, which only the (2,2) band sees.
  const double gamma_bad = 0.5 * gamma_bound;
  const double f[4] = {1.0, 2.0, 4.0, 3.0};
  double best_violation = -std::numeric_limits<double>::infinity();
  int found_at = -1;
  for (int cand = 0; cand < 100; ++cand) {
    const double s = 0.01 * (1.0 + 0.01 * cand);
    Image mid(16, 16);
    Image d(16, 16);
    for (int r = 0; r < 16; ++r) {
      for (int c = 0; c < 16; ++c) {
        mid(r, c) = s * f[r % 4] * f[c % 4];
        d(r, c) = ((r + c) % 2 == 0) ? 1.0 : -1.0;
      }
    }
    const double t = 1e-4;
    const Kernel k = random_kernel(3, 900 + static_cast<std::uint64_t>(cand));
    const Image y = random_image(16, 16, 1900 + static_cast<std::uint64_t>(cand));
    const FreqCache cache(k, y.shape());
    auto phi = [&](const Image& x) { return latent_energy(x, y, cache, gamma_bad, lambda, sigma, alpha, no_tv); };
    const double violation = phi(mid) - 0.5 * (phi(mid + t * d) + phi(mid - t * d));
    // The same pair must stay convex once gamma meets the bound.
    auto phi_bound = [&](const Image& x) {
      return latent_energy(x, y, cache, gamma_bound, lambda, sigma, alpha, no_tv);
    };
    worst_gap = std::max(worst_gap, phi_bound(mid) - 0.5 * (phi_bound(mid + t * d) + phi_bound(mid - t * d)));
    best_violation = std::max(best_violation, violation);
    if (violation > 1e-9) {
      found_at = cand;
      break;
    }
  }
  const bool convex_ok = worst_gap <= 1e-9;
  const bool witness_ok = found_at >= 0;
  return {convex_ok && witness_ok,
          fmt("gamma at bound: worst midpoint gap %.2e (<= 1e-9); ", worst_gap) +
              (witness_ok ? fmt("gamma at half the bound: counterexample #%.0f, violation %.2e", found_at,
                                best_violation)
                          : fmt("no counterexample in 100 candidates (best %.2e)", best_violation))};
}

Outcome end_to_end() {
  const Image sharp = shapes_fixture(64);
  const Kernel truth = cli::motion_kernel(7.0, 30.0);
  const Image y = add_noise(convolve_periodic(sharp, truth), 0.005, 11);
  SolverConfig cfg;
  cfg.gamma = 4e-3;
  cfg.lambda = 4e-3;
  cfg.kernel_size = {7, 7};
  const RestorationResult r = blind_deblur(y, cfg);
  const int max_shift = 5;
  const double before = shift_aligned_score(y, sharp, max_shift, Metric::Psnr).psnr;
  const double after = shift_aligned_score(r.x_final, sharp, max_shift, Metric::Psnr).psnr;
  const double ncc = aligned_kernel_ncc(r.k_final.taps(), truth.taps(), 3);
  return {after - before >= 2.0 && ncc >= 0.8,
          fmt("PSNR %.2f -> %.2f dB (gain %.2f, need >= 2)", before, after, after - before) +
              fmt(", kernel NCC %.3f (>= 0.8)", ncc)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("deblur_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  cli::write_png16(dir / "sharp.png", shapes_fixture(48));
  const std::string exe = MCPDEBLUR_EXE;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + exe + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  if (run("synthesize --input \"" + (dir / "sharp.png").string() + "\" --kernel motion:5:45 --noise-sigma 0.005 --seed 3 --out \"" +
          (dir / "syn").string() + "\"") != 0) {
    return {false, "synthesize failed"};
  }
  const std::string common = "deblur --input \"" + (dir / "syn" / "y.png").string() +
                             "\" --kernel-size 5 --gamma 4e-3 --reference \"" + (dir / "sharp.png").string() +
                             "\" --dump-traces --dump-levels --out ";
  if (run(common + "\"" + (dir / "a").string() + "\"") != 0 || run(common + "\"" + (dir / "b").string() + "\"") != 0) {
    return {false, "deblur run failed"};
  }
  int files = 0;
  std::string mismatch;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir / "a");
    ++files;
    if (!fs::exists(dir / "b" / rel) || slurp(entry.path()) != slurp(dir / "b" / rel)) mismatch = rel.string();
  }
  fs::remove_all(dir);
  if (!mismatch.empty()) return {false, "outputs differ: " + mismatch};
  return {files >= 5, fmt("%.0f output files byte-identical across two runs", files)};
}

Outcome decay_arithmetic() {
  bool ok = true;
  std::string detail;
  for (const double gamma0 : {4e-3, 1.3e-4}) {
    SolverConfig cfg;
    cfg.gamma = gamma0;
    cfg.lambda = 2.0 * gamma0;
    cfg.kernel_size = {3, 3};
    const Image sharp = shapes_fixture(32);
    const Image y = convolve_periodic(sharp, Kernel::uniform(3, 3));
    std::vector<double> seen;
    std::vector<double> seen_lambda;
    const LevelResult lr = run_level(y, Kernel::uniform(3, 3), cfg, 0, [&](const TraceRecord& rec) {
      if (rec.solver != "level") return;
      seen.push_back(rec.gamma);
      seen_lambda.push_back(rec.lambda);
    });
    // Independent arithmetic: the value in force during each alternation.
    std::vector<double> expected;
    std::vector<double> expected_lambda;
    double g = gamma0;
    double l = cfg.lambda;
    for (int i = 0; i < 5; ++i) {
      expected.push_back(g);
      expected_lambda.push_back(l);
      g = g / 1.1 > 1e-4 ? g / 1.1 : 1e-4;
      l = l / 1.1 > 1e-4 ? l / 1.1 : 1e-4;
    }
    ok = ok && seen == expected && lr.gamma == g && seen_lambda == expected_lambda && lr.lambda == l;
    detail += fmt("gamma %.1e: %.0f decays, final %.6e; ", gamma0, static_cast<double>(seen.size()), lr.gamma);
  }

  // Through the pyramid: five level records per level, restarting from cfg.gamma.
  SolverConfig cfg;
  cfg.gamma = 4e-3;
  cfg.lambda = 4e-3;
  cfg.kernel_size = {5, 5};
  const RestorationResult r = blind_deblur(convolve_periodic(shapes_fixture(32), Kernel::uniform(3, 3)), cfg);
  std::map<int, std::vector<double>> per_level;
  for (const TraceRecord& rec : r.traces) {
    if (rec.solver == "level") per_level[rec.level].push_back(rec.gamma);
  }
  for (const auto& [level, gammas] : per_level) {
    double g = cfg.gamma;
    bool level_ok = gammas.size() == 5;
    for (std::size_t i = 0; level_ok && i < gammas.size(); ++i) {
      level_ok = gammas[i] == g;
      g = std::max(g / 1.1, 1e-4);
    }
    ok = ok && level_ok;
  }
  ok = ok && per_level.size() == r.levels.size();
  detail += fmt("pyramid: %.0f levels x 5 alternations", static_cast<double>(per_level.size()));
  return {ok, detail};
}

}  // namespace

int main() {
  int failures = 0;
  failures += !report(1, "tight frame identity", 5, tight_frame);
  failures += !report(2, "Moreau/MCP oracles", 10, moreau_oracles);
  failures += !report(3, "FBS vs 1-D oracle", 30, fbs_oracle);
  failures += !report(4, "closed-form stationarity", 10, stationarity);
  failures += !report(5, "convexity bound witness", 60, convexity_witness);
  failures += !report(6, "end-to-end blind deblur", 120, end_to_end);
  failures += !report(7, "CLI determinism", 0, determinism);
  failures += !report(8, "gamma/lambda decay", 0, decay_arithmetic);
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
