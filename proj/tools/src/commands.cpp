#include "deblur/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "deblur/cli/generators.hpp"
#include "deblur/cli/io.hpp"
#include "deblur/metrics.hpp"
#include "deblur/pipeline.hpp"
#include "deblur/transforms.hpp"

namespace deblur::cli {

namespace fs = std::filesystem;

Size2 parse_kernel_size(const std::string& text) {
  auto parse_side = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || v < 1) {
      throw Error(ErrorCode::NonPositiveParameter, "kernel size '" + text + "' is not N or RxC");
    }
    return v;
  };
  const auto x = text.find_first_of("xX");
  const Size2 size = x == std::string::npos
                         ? Size2{parse_side(text), parse_side(text)}
                         : Size2{parse_side(text.substr(0, x)), parse_side(text.substr(x + 1))};
  if (size.rows % 2 == 0 || size.cols % 2 == 0) {
    throw Error(ErrorCode::EvenKernelDimension,
                "kernel size " + std::to_string(size.rows) + "x" + std::to_string(size.cols) +
                    " must be odd in both dimensions");
  }
  return size;
}

namespace {

struct RawDeblurFlags {
  std::vector<std::string> inputs;
  std::string out = ".";
  std::string kernel_size = "7";
  std::string reference;
};

void add_solver_flags(CLI::App& cmd, SolverConfig& c) {
  cmd.add_option("--gamma", c.gamma, "ridge weight on x")->capture_default_str();
  cmd.add_option("--lambda", c.lambda, "regularization weight")->capture_default_str();
  cmd.add_option("--sigma", c.sigma, "framelet MCP weight")->capture_default_str();
  cmd.add_option("--nu", c.nu, "kernel ridge weight")->capture_default_str();
  cmd.add_option("--eta", c.eta, "kernel gradient sparsity weight")->capture_default_str();
  cmd.add_option("--kappa", c.kappa, "continuation growth factor")->capture_default_str();
  cmd.add_option("--mu-max", c.mu_max, "upper limit of the mu continuation")->capture_default_str();
  cmd.add_option("--beta-max", c.beta_max, "upper limit of the beta continuation")
      ->capture_default_str();
  cmd.add_option("--xi-max", c.xi_max, "upper limit of the xi continuation")->capture_default_str();
  cmd.add_option("--epsilon", c.epsilon, "margin subtracted from the MCP concavity alpha")
      ->capture_default_str();
  cmd.add_option("--pyramid-scale", c.pyramid_scale, "per-level downscale factor")
      ->capture_default_str();
  cmd.add_option("--outer-iters", c.outer_iters, "alternations per pyramid level")
      ->capture_default_str();
}

std::string trace_csv(const std::vector<TraceRecord>& traces) {
  std::ostringstream os;
  os << "solver,level,stage,beta,mu,xi,gamma,lambda,objective,residual,iterations\n";
  char buf[512];
  for (const TraceRecord& t : traces) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  t.solver.c_str(), t.level, t.stage, t.beta, t.mu, t.xi, t.gamma, t.lambda,
                  t.objective, t.residual, t.iterations);
    os << buf;
  }
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, path.string() + ": write failed");
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, dir.string() + ": " + ec.message());
}

int exit_code_for(const Error& e) { return e.code() == ErrorCode::Io ? kExitIo : kExitConfig; }

std::mutex stderr_mutex;

void report(const std::string& context, const std::string& message) {
  std::lock_guard lock(stderr_mutex);
  std::cerr << "error: " << (context.empty() ? "" : context + ": ") << message << '\n';
}

// Runs `body`, converting exceptions to exit codes and stderr messages.
template <typename F>
int guarded(const std::string& context, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    // I/O messages already name the file.
    report(e.code() == ErrorCode::Io ? "" : context, e.what());
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    report(context, e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    report(context, e.what());
    return kExitFailure;
  }
}

void deblur_one(const fs::path& input, const fs::path& out_dir, const RunManifest& m) {
  const Raster raster = read_image(input);
  std::optional<Image> reference;
  if (m.reference) reference = read_image(*m.reference).luminance();
  make_dirs(out_dir);

  const Image luma = raster.luminance();
  RestorationResult result = blind_deblur(luma, m.config);

  Raster restored;
  if (raster.color()) {
    for (const Image& ch : raster.channels) {
      restored.channels.push_back(restore_with_kernel(ch, result.k_final, m.config));
    }
  } else {
    restored.channels.push_back(result.x_final);
  }

  write_png16(out_dir / "x_final.png", restored);
  write_kernel_text(out_dir / "kernel.txt", result.k_final);
  write_kernel_png(out_dir / "kernel.png", result.k_final);
  if (m.dump_traces) write_text(out_dir / "traces.csv", trace_csv(result.traces));
  if (m.dump_levels) {
    const fs::path dir = out_dir / "levels";
    make_dirs(dir);
    for (const LevelSnapshot& s : result.levels) {
      const std::string stem = "level_" + std::to_string(s.level);
      write_png16(dir / (stem + "_x.png"), s.x);
      write_kernel_text(dir / (stem + "_kernel.txt"), s.k);
      write_kernel_png(dir / (stem + "_kernel.png"), s.k);
    }
  }
  if (reference) {
    const Image restored_luma = restored.luminance();
    auto row = [&](const std::string& name, const std::string& kernel, const Image& img) {
      ScoreRow r{name, kernel, shift_aligned_score(img, *reference, m.max_shift, Metric::Psnr)};
      r.score.ssim = shift_aligned_score(img, *reference, m.max_shift, Metric::Ssim).ssim;
      return r;
    };
    write_text(out_dir / "scores.csv",
               format_scores_csv({row("input", "-", luma), row("x_final", "estimated", restored_luma)}));
  }
}

// One input writes straight into out_dir; a batch gets out_dir/<stem>, with
// _2, _3, ... appended when stems repeat.
std::vector<fs::path> output_dirs(const RunManifest& m) {
  if (m.inputs.size() == 1) return {m.out_dir};
  std::vector<fs::path> dirs;
  std::map<std::string, int> seen;
  for (const fs::path& input : m.inputs) {
    const std::string stem = input.stem().string();
    const int n = ++seen[stem];
    dirs.push_back(m.out_dir / (n == 1 ? stem : stem + "_" + std::to_string(n)));
  }
  return dirs;
}

}  // namespace

int cmd_deblur(const RunManifest& m) {
  return guarded("", [&] {
    if (m.inputs.empty()) throw Error(ErrorCode::Io, "no --input given");
    if (m.jobs < 1) throw Error(ErrorCode::NonPositiveParameter, "--jobs must be >= 1");
    if (m.max_shift < 0) throw Error(ErrorCode::NonPositiveParameter, "--max-shift must be >= 0");
    validate_config(m.config);

    const std::vector<fs::path> dirs = output_dirs(m);
    std::vector<int> codes(m.inputs.size(), kExitOk);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < m.inputs.size(); i = next++) {
        const fs::path& input = m.inputs[i];
        codes[i] = guarded(input.string(), [&] {
          deblur_one(input, dirs[i], m);
          return kExitOk;
        });
      }
    };
    const std::size_t nthreads =
        std::min<std::size_t>(static_cast<std::size_t>(m.jobs), m.inputs.size());
    if (nthreads <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }
    return *std::max_element(codes.begin(), codes.end());
  });
}

int cmd_synthesize(const SynthesizeOptions& o) {
  return guarded("synthesize", [&] {
    if (o.noise_sigma < 0.0) {
      throw Error(ErrorCode::NonPositiveParameter, "--noise-sigma must be >= 0");
    }
    Kernel k = Kernel::delta(1, 1);
    if (!parse_kernel_spec(o.kernel, k)) k = read_kernel_text(o.kernel);
    Raster raster = read_image(o.input);
    make_dirs(o.out_dir);
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> noise(0.0, o.noise_sigma);
    for (Image& ch : raster.channels) {
      ch = convolve_periodic(ch, k);
      if (o.noise_sigma > 0.0) {
        for (double& v : ch.values()) v += noise(rng);
      }
    }
    write_png16(o.out_dir / "y.png", raster);
    write_kernel_text(o.out_dir / "kernel.txt", k);
    write_kernel_png(o.out_dir / "kernel.png", k);
    return kExitOk;
  });
}

int cmd_score(const ScoreOptions& o) {
  return guarded("score", [&] {
    const Image a = read_image(o.restored).luminance();
    const Image b = read_image(o.reference).luminance();
    if (a.shape() != b.shape()) {
      throw Error(ErrorCode::ShapeMismatch, "score: images differ in size");
    }
    if (o.max_shift < 0) throw Error(ErrorCode::NonPositiveParameter, "--max-shift must be >= 0");
    ScoreRow row{o.restored.filename().string(), "-",
                 shift_aligned_score(a, b, o.max_shift, Metric::Psnr)};
    // The SSIM column uses its own best shift.
    row.score.ssim = shift_aligned_score(a, b, o.max_shift, Metric::Ssim).ssim;
    const std::string csv = format_scores_csv({row});
    if (o.out) {
      write_text(*o.out, csv);
      std::cout << format_scores_table({row});
    } else {
      std::cout << csv;
    }
    return kExitOk;
  });
}

namespace {

struct Parser {
  CLI::App app{"Blind image deblurring with a framelet MCP prior", "mcpdeblur"};
  ParsedCommand parsed;
  RawDeblurFlags raw;
  std::string synth_out = ".";
  std::string score_out;
  CLI::App* deblur = nullptr;
  CLI::App* synthesize = nullptr;
  CLI::App* score = nullptr;

  Parser() {
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file; keys of the [deblur] section mirror the flags")
        ->envname("DEBLUR_CONFIG");

    deblur = app.add_subcommand("deblur", "estimate the blur kernel and restore the image");
    RunManifest& m = parsed.deblur;
    deblur->add_option("--input", raw.inputs, "blurred image(s), PNG or PGM")->required();
    deblur->add_option("--out", raw.out, "output directory")->capture_default_str();
    deblur->add_option("--kernel-size", raw.kernel_size, "kernel support, N or RxC (odd)")
        ->capture_default_str();
    add_solver_flags(*deblur, m.config);
    deblur->add_option("--reference", raw.reference, "sharp image for scores.csv");
    deblur->add_option("--max-shift", m.max_shift, "shift search radius for scoring")
        ->capture_default_str();
    deblur->add_flag("--dump-traces", m.dump_traces, "write traces.csv");
    deblur->add_flag("--dump-levels", m.dump_levels, "write per-level estimates to levels/");
    deblur->add_option("--jobs", m.jobs, "parallel jobs in batch mode")->capture_default_str();

    synthesize = app.add_subcommand("synthesize", "blur a sharp image and add Gaussian noise");
    SynthesizeOptions& s = parsed.synthesize;
    synthesize->add_option("--input", s.input, "sharp image")->required();
    synthesize->add_option("--kernel", s.kernel,
                           "delta | box:N | gaussian:S[:SIZE] | motion:L:ANGLE | kernel file")
        ->capture_default_str();
    synthesize->add_option("--noise-sigma", s.noise_sigma, "noise standard deviation")
        ->capture_default_str();
    synthesize->add_option("--seed", s.seed, "noise seed")->capture_default_str();
    synthesize->add_option("--out", synth_out, "output directory")->capture_default_str();

    score = app.add_subcommand("score", "shift-aligned PSNR/SSIM of two images");
    ScoreOptions& c = parsed.score;
    score->add_option("--restored", c.restored, "image to evaluate")->required();
    score->add_option("--reference", c.reference, "ground truth")->required();
    score->add_option("--max-shift", c.max_shift, "shift search radius")->capture_default_str();
    score->add_option("--out", score_out, "CSV path (stdout when omitted)");
  }

  void parse(const std::vector<std::string>& args) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (deblur->parsed()) {
      parsed.name = "deblur";
      RunManifest& m = parsed.deblur;
      m.inputs.assign(raw.inputs.begin(), raw.inputs.end());
      m.out_dir = raw.out;
      m.config.kernel_size = parse_kernel_size(raw.kernel_size);
      if (!raw.reference.empty()) m.reference = raw.reference;
    } else if (synthesize->parsed()) {
      parsed.name = "synthesize";
      parsed.synthesize.out_dir = synth_out;
    } else {
      parsed.name = "score";
      if (!score_out.empty()) parsed.score.out = score_out;
    }
  }
};

}  // namespace

ParsedCommand parse_command_line(const std::vector<std::string>& args) {
  Parser p;
  p.parse(args);
  return p.parsed;
}

int run_cli(const std::vector<std::string>& args) {
  Parser p;
  try {
    p.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return p.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return p.app.exit(e);
  } catch (const CLI::ParseError& e) {
    p.app.exit(e);
    return kExitConfig;
  } catch (const Error& e) {
    report("", e.what());
    return exit_code_for(e);
  }
  const ParsedCommand& c = p.parsed;
  if (c.name == "deblur") return cmd_deblur(c.deblur);
  if (c.name == "synthesize") return cmd_synthesize(c.synthesize);
  return cmd_score(c.score);
}

}  // namespace deblur::cli
