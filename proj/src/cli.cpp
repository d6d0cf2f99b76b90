#include "slmulti/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "slmulti/errors.hpp"
#include "slmulti/oracles.hpp"
#include "slmulti/propagate.hpp"
#include "slmulti/resolvent.hpp"
#include "slmulti/spectral.hpp"
#include "slmulti/triplet.hpp"

namespace slmulti {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

SpecDocument load_valid(const std::string& path) {
  SpecDocument doc = load_spec_document(path);
  const ValidationReport report = validate_problem(doc.problem);
  if (!report.ok) {
    std::string msg = "invalid problem in " + path + ":";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  return doc;
}

std::vector<double> split_numbers(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("cannot parse ") + what + " \"" + text + "\"");
    }
  }
  if (out.size() != expected) {
    throw UsageError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated numbers");
  }
  return out;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

// ---------------------------------------------------------------- classify

void cmd_classify(const SpecDocument& doc, bool as_json, std::ostream& out) {
  const Classification c = classify_K(doc.K, doc.sign);
  if (as_json) {
    out << "{\"kind\": " << json_string(to_string(c.kind)) << ", \"sign\": "
        << json_string(to_string(doc.sign)) << ", \"is_contraction\": " << std::boolalpha
        << c.is_contraction << ", \"is_unitary\": " << c.is_unitary
        << ", \"is_symmetric\": " << c.is_symmetric << ", \"norm\": " << format_number(c.norm)
        << ", \"unitarity_defect\": " << format_number(c.unitarity_defect)
        << ", \"symmetry_defect\": " << format_number(c.symmetry_defect) << "}\n";
    return;
  }
  out << "kind: " << to_string(c.kind) << "\n"
      << "sign: " << to_string(doc.sign) << "\n"
      << std::boolalpha << "is_contraction: " << c.is_contraction << "\n"
      << "is_unitary: " << c.is_unitary << "\n"
      << "is_symmetric: " << c.is_symmetric << "\n"
      << "norm: " << format_number(c.norm) << "\n"
      << "unitarity_defect: " << format_number(c.unitarity_defect) << "\n"
      << "symmetry_defect: " << format_number(c.symmetry_defect) << "\n";
}

// --------------------------------------------------------------------- eig

struct EigArgs {
  std::string spec;
  double lmin = 0.0, lmax = 0.0;
  bool has_lmin = false, has_lmax = false;
  std::string rect;
  double tol = 1e-10;
  std::size_t max_eigs = 0;
  std::string format = "csv";
  std::string emit_dir;
};

void write_function_csv(const std::filesystem::path& path, const MultiFunction& f) {
  std::ofstream file(path);
  if (!file) throw ValidationError("cannot write " + path.string());
  file << "t,re_y,im_y\n";
  for (const auto& part : f.parts) {
    for (std::size_t k = 0; k < part.u.size(); ++k) {
      file << format_number(part.grid.t[k]) << ',' << format_number(part.u[k].real()) << ','
           << format_number(part.u[k].imag()) << '\n';
    }
  }
}

void cmd_eig(const EigArgs& args, std::ostream& out) {
  const SpecDocument doc = load_valid(args.spec);
  const BoundaryParameter bp = doc.boundary();
  SpectralOptions opts;
  opts.propagation.tol = args.tol;
  opts.max_eigs = args.max_eigs;
  opts.compute_functions = !args.emit_dir.empty();

  std::vector<Eigenpair> pairs;
  if (!args.rect.empty()) {
    const auto r = split_numbers(args.rect, 4, "--rect");
    if (!(r[1] > r[0]) || !(r[3] > r[2])) throw UsageError("--rect needs re_min < re_max and im_min < im_max");
    pairs = find_eigenvalues_region(doc.problem, bp, Rect{r[0], r[1], r[2], r[3]}, opts).eigenpairs;
  } else {
    if (!args.has_lmin || !args.has_lmax) throw UsageError("eig needs --lmin and --lmax, or --rect");
    if (!(args.lmax > args.lmin)) throw UsageError("--lmax must be greater than --lmin");
    if (bp.flags.kind != ExtensionKind::SelfAdjoint && bp.flags.kind != ExtensionKind::SelfAdjointReal) {
      throw UsageError("extension is " + to_string(bp.flags.kind) +
                       "; a real window needs a self-adjoint K, use --rect");
    }
    pairs = find_eigenvalues_real(doc.problem, bp, args.lmin, args.lmax, opts);
  }

  if (args.format == "json") {
    out << "{\"eigenvalues\": [";
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      out << (k ? ", " : "") << "{\"re\": " << format_number(pairs[k].lambda.real())
          << ", \"im\": " << format_number(pairs[k].lambda.imag())
          << ", \"multiplicity\": " << pairs[k].multiplicity << "}";
    }
    out << "]}\n";
  } else {
    out << "re_lambda,im_lambda,multiplicity\n";
    for (const auto& ep : pairs) {
      out << format_number(ep.lambda.real()) << ',' << format_number(ep.lambda.imag()) << ','
          << ep.multiplicity << '\n';
    }
  }
  if (!args.emit_dir.empty()) {
    std::filesystem::create_directories(args.emit_dir);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      for (std::size_t j = 0; j < pairs[k].functions.size(); ++j) {
        const std::string name = "eig_" + std::to_string(k) + (j ? "_" + std::to_string(j) : "") + ".csv";
        write_function_csv(std::filesystem::path(args.emit_dir) / name, pairs[k].functions[j]);
      }
    }
  }
}

// ----------------------------------------------------------------- resolve

struct ResolveArgs {
  std::string spec;
  std::string lambda;
  std::string h_file;
  std::size_t grid = 101;
  std::string out_file;
};

Forcing read_forcing(const std::string& path, const Partition& partition) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open h file " + path);
  std::vector<double> ts;
  std::vector<cplx> hs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    bool numeric = true;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (ts.empty()) continue;  // header
      throw ValidationError("h file line " + std::to_string(lineno) + ": non-numeric field");
    }
    if (row.size() < 2 || row.size() > 3) {
      throw ValidationError("h file line " + std::to_string(lineno) + ": expected t, re_h[, im_h]");
    }
    ts.push_back(row[0]);
    hs.emplace_back(row[1], row.size() == 3 ? row[2] : 0.0);
  }
  if (ts.size() < 4) throw ValidationError("h file needs at least four samples");
  for (std::size_t k = 1; k < ts.size(); ++k) {
    if (!(ts[k] > ts[k - 1])) {
      throw ValidationError("h file grid is not strictly increasing near t = " + format_number(ts[k]));
    }
  }
  const double slack = 1e-9 * std::max(1.0, partition.length());
  if (ts.front() > partition.points.front() + slack || ts.back() < partition.points.back() - slack) {
    throw ValidationError("h file grid [" + format_number(ts.front()) + ", " + format_number(ts.back()) +
                          "] does not cover the partition [" + format_number(partition.points.front()) +
                          ", " + format_number(partition.points.back()) + "]");
  }
  return Forcing::from_samples(std::move(ts), std::move(hs));
}

void cmd_resolve(const ResolveArgs& args, std::ostream& out) {
  const SpecDocument doc = load_valid(args.spec);
  const auto lam = split_numbers(args.lambda, 2, "--lambda");
  const cplx lambda(lam[0], lam[1]);
  if (args.grid < 2) throw UsageError("--grid must be at least 2");
  const Forcing h = read_forcing(args.h_file, doc.problem.partition);
  const std::vector<Forcing> forcing(doc.problem.intervals(), h);

  ResolventResult result;
  if (doc.k_family) {
    if (lambda.imag() == 0.0) throw UsageError("a K family needs non-real --lambda");
    result = generalized_resolvent(doc.problem, KFamily::constant(doc.K), lambda, forcing);
  } else {
    result = apply_resolvent(doc.problem, doc.boundary(), lambda, forcing);
  }

  std::ostringstream body;
  body << "# lambda=" << format_number(lambda.real()) << ',' << format_number(lambda.imag())
       << " defect=" << format_number(result.defect) << " bc_defect=" << format_number(result.bc_defect)
       << '\n';
  body << "t,re_y,im_y\n";
  for (const auto& part : result.y.parts) {
    const double a = part.grid.left(), b = part.grid.right();
    for (std::size_t k = 0; k < args.grid; ++k) {
      const double t = k + 1 == args.grid ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(args.grid - 1);
      const cplx y = part.grid.interpolate(part.u, t);
      body << format_number(t) << ',' << format_number(y.real()) << ',' << format_number(y.imag()) << '\n';
    }
  }
  if (args.out_file.empty()) {
    out << body.str();
  } else {
    std::ofstream file(args.out_file);
    if (!file) throw ValidationError("cannot write " + args.out_file);
    file << body.str();
  }
}

// ------------------------------------------------------------------ verify

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Single delta (or none) on a Dirichlet problem glued by transmission
// conditions, with r = 1 throughout.
struct DeltaProblem {
  double length = 0.0;
  std::optional<std::pair<double, double>> jump;  // (position from a, height)
};

std::optional<DeltaProblem> as_delta_problem(const SpecDocument& doc) {
  const auto& spec = doc.problem;
  const std::size_t m = spec.intervals();
  const auto [A, B] = transmission_conditions(m);
  MatX expected;
  try {
    expected = kappa_from_AB(A, B, doc.sign);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  if ((expected - doc.K).cwiseAbs().maxCoeff() > 1e-9) return std::nullopt;

  DeltaProblem out;
  out.length = spec.partition.length();
  const double a = spec.partition.points.front();
  std::optional<double> last_q;
  int jumps = 0;
  for (const auto& c : spec.coeffs) {
    for (const auto& piece : c.r.pieces) {
      if (piece.empty() || piece[0] != 1.0 || !c.r.is_piecewise_constant()) return std::nullopt;
    }
    if (!c.Q.is_piecewise_constant()) return std::nullopt;
    for (std::size_t j = 0; j < c.Q.pieces.size(); ++j) {
      const double q = c.Q.pieces[j].empty() ? 0.0 : c.Q.pieces[j][0];
      if (last_q && q != *last_q) {
        ++jumps;
        out.jump = {c.Q.knots[j] - a, q - *last_q};
      }
      last_q = q;
    }
  }
  if (jumps > 1) return std::nullopt;
  return out;
}

}  // namespace

std::vector<PropertyCheck> run_property_suite(const SpecDocument& doc, std::uint64_t seed) {
  std::vector<PropertyCheck> checks;
  const auto& spec = doc.problem;
  const ValidationReport report = validate_problem(spec);
  checks.push_back({"validation", report.ok, report.ok ? "ok" : report.violations.front()});
  if (!report.ok) return checks;

  const BoundaryParameter bp = doc.boundary();
  checks.push_back({"classification", bp.flags.kind != ExtensionKind::NotClassified,
                    to_string(bp.flags.kind) + " (norm " + sci(bp.flags.norm) + ")"});

  const PropagationOptions prop;
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < spec.intervals(); ++i) {
      for (const cplx lambda : {cplx(0.0), cplx(1.0), cplx(-1.0, 2.0), cplx(0.0, 10.0), cplx(25.0)}) {
        worst = std::max(worst, std::abs(transfer_matrix(spec.coeffs[i], lambda, prop, i).T.determinant() - 1.0));
      }
    }
    checks.push_back({"transfer_determinant", worst <= 1e-9, "max |det T - 1| = " + sci(worst)});
  }
  {
    double worst = 0.0;
    const cplx lambda(3.0, -1.0);
    for (std::size_t i = 0; i < spec.intervals(); ++i) {
      const auto& c = spec.coeffs[i];
      const double mid = 0.5 * (c.left() + c.right());
      const Mat2 whole = transfer_matrix(c, lambda, prop, i).T;
      const Mat2 split = transfer_matrix(c.restricted(mid, c.right()), lambda, prop, i).T *
                         transfer_matrix(c.restricted(c.left(), mid), lambda, prop, i).T;
      worst = std::max(worst, (whole - split).cwiseAbs().maxCoeff() / std::max(1.0, whole.cwiseAbs().maxCoeff()));
    }
    checks.push_back({"transfer_semigroup", worst <= 10.0 * prop.tol, "max rel. deviation = " + sci(worst)});
  }
  {
    bool applicable = true;
    double worst = 0.0;
    const cplx lambda(3.0, -1.0);
    for (std::size_t i = 0; i < spec.intervals() && applicable; ++i) {
      const auto& c = spec.coeffs[i];
      if (!c.r.is_piecewise_constant() || !c.Q.is_piecewise_constant()) {
        applicable = false;
        break;
      }
      const auto breaks = c.breakpoints();
      std::vector<std::pair<Mat2, double>> pieces;
      for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        const double mid = 0.5 * (breaks[j] + breaks[j + 1]);
        pieces.emplace_back(system_matrix(c, lambda, mid), breaks[j + 1] - breaks[j]);
      }
      const Mat2 oracle = exp_product_transfer(pieces);
      const Mat2 T = transfer_matrix(c, lambda, prop, i).T;
      worst = std::max(worst, (T - oracle).cwiseAbs().maxCoeff() / std::max(1.0, oracle.cwiseAbs().maxCoeff()));
    }
    if (applicable) {
      checks.push_back({"exp_product_oracle", worst <= 10.0 * prop.tol, "max rel. deviation = " + sci(worst)});
    }
  }
  {
    const SurjectivityCertificate cert = trace_surjectivity_certificate(spec, prop);
    checks.push_back({"surjectivity_rank", cert.full(),
                      "rank " + std::to_string(cert.rank) + " of " + std::to_string(cert.expected) +
                          ", sigma_min " + sci(cert.singular_values.back())});
  }
  {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const MultiFunction f = random_multifunction(spec, rng);
      const MultiFunction g = random_multifunction(spec, rng);
      const GreenDefect d = green_identity_defect(f, g);
      worst = std::max(worst, std::abs(d.defect) / d.scale);
    }
    checks.push_back({"green_identity", worst <= 1e-8, "max |defect| / scale = " + sci(worst)});
  }
  if (bp.flags.kind != ExtensionKind::NotClassified) {
    if (const auto delta = as_delta_problem(doc)) {
      const int n = 5;
      const OracleSpectrum oracle =
          delta->jump ? delta_dirichlet_spectrum(delta->length, delta->jump->first, delta->jump->second, n)
                      : free_dirichlet_spectrum(delta->length, n);
      const auto& ev = oracle.eigenvalues;
      const double lmin = ev[0] - 0.5 * (ev[1] - ev[0]);
      const double lmax = ev[n - 1] + 0.5 * (ev[n - 1] - ev[n - 2]);
      const auto pairs = find_eigenvalues_real(spec, bp, lmin, lmax);
      bool ok = static_cast<int>(pairs.size()) == n;
      double worst = 0.0;
      for (int k = 0; ok && k < n; ++k) {
        worst = std::max(worst, std::abs(pairs[k].lambda.real() - ev[k]) / std::max(1.0, std::abs(ev[k])));
      }
      ok = ok && worst <= 1e-8;
      const std::string name = spec.intervals() > 1 ? "gluing_consistency" : "oracle_spectrum";
      checks.push_back({name, ok,
                        oracle.tag + ": " + std::to_string(pairs.size()) + " eigenvalues, max rel. error " + sci(worst)});
    }
  }
  return checks;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-interval Sturm-Liouville problems with distributional potentials", "slmulti"};
  app.require_subcommand(1);

  std::string classify_spec;
  bool classify_json = false;
  auto* classify = app.add_subcommand("classify", "Classify the boundary parameter K");
  classify->add_option("spec", classify_spec, "Problem document (JSON)")->required();
  classify->add_flag("--json", classify_json, "Emit JSON");

  EigArgs eig_args;
  auto* eig = app.add_subcommand("eig", "Eigenvalues in a real window or complex rectangle");
  eig->add_option("spec", eig_args.spec, "Problem document (JSON)")->required();
  auto* lmin_opt = eig->add_option("--lmin", eig_args.lmin, "Window start");
  auto* lmax_opt = eig->add_option("--lmax", eig_args.lmax, "Window end");
  eig->add_option("--rect", eig_args.rect, "re_min,re_max,im_min,im_max");
  eig->add_option("--tol", eig_args.tol, "Propagation tolerance");
  eig->add_option("--max-eigs", eig_args.max_eigs, "Keep at most this many eigenvalues");
  eig->add_option("--out", eig_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  eig->add_option("--emit-functions", eig_args.emit_dir, "Directory for eigenfunction CSV files");

  ResolveArgs resolve_args;
  auto* resolve = app.add_subcommand("resolve", "Apply the (generalized) resolvent to h");
  resolve->set_help_flag("--help", "Print this help message and exit");
  resolve->add_option("spec", resolve_args.spec, "Problem document (JSON)")->required();
  resolve->add_option("--lambda", resolve_args.lambda, "re,im")->required();
  resolve->add_option("--h", resolve_args.h_file, "CSV of t, re_h[, im_h]")->required();
  resolve->add_option("--grid", resolve_args.grid, "Output points per interval");
  resolve->add_option("--out", resolve_args.out_file, "Output CSV (default stdout)");

  std::string verify_spec;
  auto* verify = app.add_subcommand("verify", "Run the property suite on a problem document");
  verify->add_option("spec", verify_spec, "Problem document (JSON)")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*classify) {
      cmd_classify(load_valid(classify_spec), classify_json, out);
    } else if (*eig) {
      eig_args.has_lmin = lmin_opt->count() > 0;
      eig_args.has_lmax = lmax_opt->count() > 0;
      cmd_eig(eig_args, out);
    } else if (*resolve) {
      cmd_resolve(resolve_args, out);
    } else if (*verify) {
      const SpecDocument doc = load_spec_document(verify_spec);
      bool all = true;
      for (const auto& check : run_property_suite(doc)) {
        out << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
        all = all && check.passed;
      }
      return all ? kExitOk : kExitNumerical;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SpectrumError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace slmulti
