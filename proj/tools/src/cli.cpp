#include "mixncut_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mixncut/bench.hpp"
#include "mixncut/image.hpp"
#include "mixncut/parallel.hpp"
#include "mixncut/pipeline.hpp"

namespace mixncut::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::unreadable_file:
    case Errc::unsupported_format:
    case Errc::malformed_image:
    case Errc::zero_size_image:
    case Errc::write_failed:
      return kIoError;
    case Errc::no_convergence:
      return kNoConvergence;
    default:
      return kBadArguments;
  }
}

int parse(CLI::App& app, const std::vector<std::string>& args,
          std::ostream& out, std::ostream& err) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kBadArguments;
  }
  return -1;
}

Raster8 label_raster(const Labeling& labels, std::size_t w, std::size_t h) {
  Raster8 r{w, h, 1, std::vector<std::uint8_t>(w * h)};
  const int k = std::max(labels.k, 2);
  for (std::size_t j = 0; j < w * h; ++j)
    r.pixels[j] = static_cast<std::uint8_t>(
        std::lround(255.0 * labels.labels[j] / double(k - 1)));
  return r;
}

Raster8 overlay_raster(const AppearanceImage& image, const Labeling& labels) {
  const std::size_t w = image.width(), h = image.height();
  const Raster8 base = to_raster(image);
  Raster8 r{w, h, 3, std::vector<std::uint8_t>(w * h * 3)};
  for (std::size_t j = 0; j < w * h; ++j)
    for (std::size_t c = 0; c < 3; ++c)
      r.pixels[3 * j + c] = base.pixels[base.channels == 3 ? 3 * j + c : j];
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t j = y * w + x;
      const int l = labels.labels[j];
      const bool edge = (x + 1 < w && labels.labels[j + 1] != l) ||
                        (x > 0 && labels.labels[j - 1] != l) ||
                        (y + 1 < h && labels.labels[j + w] != l) ||
                        (y > 0 && labels.labels[j - w] != l);
      if (!edge) continue;
      r.pixels[3 * j] = 255;
      r.pixels[3 * j + 1] = 0;
      r.pixels[3 * j + 2] = 0;
    }
  return r;
}

// Writes every raster to a sibling temp file, then renames them all.
void write_outputs(const std::vector<std::pair<fs::path, Raster8>>& files) {
  std::vector<fs::path> temps;
  try {
    for (const auto& [path, raster] : files) {
      fs::path tmp = path;
      tmp += ".tmp";
      temps.push_back(tmp);
      save_png(tmp, raster);
    }
    for (std::size_t k = 0; k < files.size(); ++k)
      fs::rename(temps[k], files[k].first);
  } catch (const fs::filesystem_error& e) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    fail(Errc::write_failed, e.what());
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
}

void print_diagnostics(std::ostream& out, const SegmentDiagnostics& d) {
  out << std::setprecision(12);
  for (const auto& t : d.timings)
    out << "stage " << std::left << std::setw(12) << t.stage << std::right
        << std::fixed << std::setprecision(3) << t.seconds << " s\n"
        << std::defaultfloat << std::setprecision(12);
  out << "total " << std::fixed << std::setprecision(3) << d.total_seconds()
      << " s\n"
      << std::defaultfloat << std::setprecision(12);
  for (std::size_t k = 0; k < d.eigenvalues.size(); ++k) {
    out << "eigenvalue[" << k << "] " << d.eigenvalues[k];
    if (k < d.eigenvalue_imag.size() && d.eigenvalue_imag[k] != 0)
      out << (d.eigenvalue_imag[k] > 0 ? " + " : " - ")
          << std::abs(d.eigenvalue_imag[k]) << "i";
    if (k < d.residuals.size()) out << "  residual " << d.residuals[k];
    out << "\n";
  }
  out << "matvecs " << d.matvecs << (d.converged ? "" : " (not converged)")
      << "\n";
  if (d.realized_clusters) out << "clusters " << d.realized_clusters << "\n";
  out << "sampled edges " << d.sampled_edges << "\n";
  if (d.objective)
    out << "mixncut objective " << *d.objective
        << (d.objective_subsampled ? " (subsampled)" : "") << "\n";
  for (const auto& w : d.warnings) out << "warning: " << w << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

}  // namespace

int cmd_segment(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Segment one image", "mixncut segment"};
  std::string input, method = "mixncut", prefix = "out";
  MixConfig mix;
  NcutConfig nc;
  double edges_per_pixel = -1.0;
  int regions = 2;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--input", input, "PGM/PPM/PNG image")->required();
  app.add_option("--method", method, "mixncut | ncut | ncut-gabor")
      ->check(CLI::IsMember({"mixncut", "ncut", "ncut-gabor"}));
  app.add_option("--lambda", mix.lambda, "grid-chain weight (mixncut)")
      ->capture_default_str();
  app.add_option("--sigma", mix.sigma, "appearance bandwidth (mixncut)")
      ->capture_default_str();
  app.add_option("--sigma-i", nc.sigma_i, "intensity bandwidth (ncut)")
      ->capture_default_str();
  app.add_option("--sigma-x", nc.sigma_x, "spatial bandwidth (ncut)")
      ->capture_default_str();
  app.add_option("--edges-per-pixel", edges_per_pixel,
                 "sampled edges per pixel (default 2 for mixncut, 100 for ncut)");
  app.add_option("--clusters", mix.num_clusters, "pixel clusters L (mixncut)")
      ->capture_default_str();
  app.add_option("--regions", regions, "number of segments")
      ->check(CLI::Range(2, 255))
      ->capture_default_str();
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--out-prefix", prefix, "output path prefix")
      ->capture_default_str();
  app.add_option("--threads", threads, "worker cap (0 = all cores)");
  EigenOptions solver;
  app.add_option("--tol", solver.tol, "eigen residual tolerance")
      ->capture_default_str();
  app.add_option("--max-matvecs", solver.max_matvecs,
                 "eigensolver budget in operator applications")
      ->capture_default_str();
  if (int rc = parse(app, args, out, err); rc >= 0) return rc;

  set_max_threads(threads);
  try {
    const AppearanceImage image = load_image(input);
    SegmentResult result;
    if (method == "mixncut") {
      mix.regions = regions;
      mix.seed = seed;
      mix.solver = solver;
      if (edges_per_pixel >= 0) mix.edges_per_pixel = edges_per_pixel;
      result = segment_mixncut(image, mix);
    } else {
      nc.regions = regions;
      nc.seed = seed;
      nc.solver = solver;
      nc.use_gabor = method == "ncut-gabor";
      if (edges_per_pixel >= 0) nc.edges_per_pixel = edges_per_pixel;
      result = segment_ncut(image, nc);
    }
    print_diagnostics(out, result.diagnostics);
    const std::size_t w = image.width(), h = image.height();
    std::vector<std::pair<fs::path, Raster8>> files;
    files.emplace_back(prefix + "_labels.png", label_raster(result.labels, w, h));
    files.emplace_back(prefix + "_overlay.png",
                       overlay_raster(image, result.labels));
    files.emplace_back(prefix + "_eig2.png",
                       render_scalar_field(result.diagnostics.second_eigenvector,
                                           w, h));
    write_outputs(files);
    for (const auto& f : files) out << "wrote " << f.first.string() << "\n";
    return kOk;
  } catch (const SolverFailure& e) {
    err << "error: " << e.what() << "\n";
    print_diagnostics(err, e.diagnostics());
    return kNoConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

int cmd_bench(const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
  CLI::App app{"Run the texture benchmark sweep", "mixncut bench"};
  std::string patterns = "vertical-halves,centered-disk,two-corners-diagonal";
  std::string methods = "ncut,ncut-gabor,mixncut";
  std::string grid = "full", texture_dir, out_csv = "bench.csv";
  std::vector<double> lambdas, sigmas, sigma_is, sigma_xs;
  SweepConfig config;
  unsigned threads = 0;
  bool quiet = false;
  app.add_option("--patterns", patterns, "comma-separated pattern names")
      ->capture_default_str();
  app.add_option("--methods", methods, "comma-separated: ncut, ncut-gabor, mixncut")
      ->capture_default_str();
  app.add_option("--grid", grid, "parameter grid preset")
      ->check(CLI::IsMember({"full", "coarse"}))
      ->capture_default_str();
  app.add_option("--lambdas", lambdas, "override mixncut lambda grid")
      ->delimiter(',');
  app.add_option("--sigmas", sigmas, "override mixncut sigma grid")
      ->delimiter(',');
  app.add_option("--sigma-is", sigma_is, "override ncut sigma_I grid")
      ->delimiter(',');
  app.add_option("--sigma-xs", sigma_xs, "override ncut sigma_X grid")
      ->delimiter(',');
  app.add_option("--size", config.size, "composite side length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--texture-dir", texture_dir,
                 "use every image in this directory, all unordered pairs");
  app.add_option("--clusters", config.clusters, "pixel clusters L (mixncut)")
      ->capture_default_str();
  app.add_option("--mix-edges-per-pixel", config.mix_edges_per_pixel)
      ->capture_default_str();
  app.add_option("--ncut-edges-per-pixel", config.ncut_edges_per_pixel)
      ->capture_default_str();
  app.add_option("--seed", config.seed, "sweep seed")->capture_default_str();
  app.add_option("--out", out_csv, "per-run CSV path (summary goes to "
                                   "<stem>_summary.csv)")
      ->capture_default_str();
  app.add_option("--threads", threads, "worker cap (0 = all cores)");
  app.add_flag("--quiet", quiet, "no per-run progress lines");
  if (int rc = parse(app, args, out, err); rc >= 0) return rc;

  config.patterns.clear();
  for (const auto& name : split_list(patterns)) {
    auto p = parse_pattern(name);
    if (!p) {
      err << "error: unknown pattern '" << name << "'\n";
      return kBadArguments;
    }
    config.patterns.push_back(*p);
  }
  config.methods.clear();
  for (const auto& name : split_list(methods)) {
    auto m = parse_method(name);
    if (!m) {
      err << "error: unknown method '" << name << "'\n";
      return kBadArguments;
    }
    config.methods.push_back(*m);
  }
  if (grid == "coarse") {
    config.mix_lambdas = {0.995};
    config.mix_sigmas = {10, 30};
    config.ncut_sigma_is = {20, 60, 100};
    config.ncut_sigma_xs = {20, 60, 100};
  }
  if (!lambdas.empty()) config.mix_lambdas = lambdas;
  if (!sigmas.empty()) config.mix_sigmas = sigmas;
  if (!sigma_is.empty()) config.ncut_sigma_is = sigma_is;
  if (!sigma_xs.empty()) config.ncut_sigma_xs = sigma_xs;

  set_max_threads(threads);
  try {
    if (!texture_dir.empty()) config.use_texture_dir(texture_dir);
    const SweepResult result = run_sweep(config, quiet ? nullptr : &err);

    const fs::path csv_path(out_csv);
    fs::path summary_path = csv_path;
    summary_path.replace_filename(csv_path.stem().string() + "_summary.csv");
    for (const auto& [path, body] :
         {std::pair{csv_path, 0}, std::pair{summary_path, 1}}) {
      fs::path tmp = path;
      tmp += ".tmp";
      {
        std::ofstream f(tmp);
        if (!f) fail(Errc::write_failed, "cannot write " + tmp.string());
        if (body == 0)
          write_runs_csv(f, result.runs);
        else
          write_summary_csv(f, result.summary);
        if (!f) fail(Errc::write_failed, "cannot write " + tmp.string());
      }
      fs::rename(tmp, path);
    }
    out << format_summary_table(result.summary);
    out << "wrote " << csv_path.string() << " and " << summary_path.string()
        << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  const std::string usage =
      "usage: mixncut <segment|bench> [options]\n"
      "       mixncut <segment|bench> --help\n";
  if (args.empty()) {
    err << usage;
    return kBadArguments;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (args[0] == "segment") return cmd_segment(rest, out, err);
  if (args[0] == "bench") return cmd_bench(rest, out, err);
  if (args[0] == "--help" || args[0] == "-h") {
    out << usage;
    return kOk;
  }
  err << "error: unknown command '" << args[0] << "'\n" << usage;
  return kBadArguments;
}

}  // namespace mixncut::cli
