// Command line front end: block decompositions, building embeddings,
// filtration comparisons, grid searches, and the lattice-class tree export.
//
// Exit codes: 0 when every requested check passes, 1 when a check fails
// (the failing line carries a witness), 2 on capability or input errors
// (unknown scenario, unreadable file, unsupported element, bad flags).

#include "CLI11.hpp"
#include "json_io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace btlf;

std::string poly_str(const std::vector<FElem>& f) {
  std::ostringstream os;
  bool first = true;
  for (int k = static_cast<int>(f.size()) - 1; k >= 0; --k) {
    FElem cf = f[k];
    if (cf == cf.L->zero()) continue;
    // pull a rational sign out front when the coefficient is plain rational
    bool flat = true;
    for (size_t c = 1; c < cf.c.size(); ++c) flat = flat && cf.c[c] == 0;
    const bool neg = flat && !cf.c.empty() && cf.c[0] < 0;
    if (!first) os << (neg ? " - " : " + ");
    if (first && neg) os << "-";
    if (neg) cf = Rat(-1) * cf;
    if (k == 0) {
      os << cf.str();
    } else {
      if (!(cf == cf.L->one())) os << cf.str() << "*";
      os << "x";
      if (k > 1) os << "^" << k;
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

std::string offsets_str(const LatticeFunction& lf) {
  const LatticeFunction c = canonicalize(lf);
  std::ostringstream os;
  os << "offsets(";
  for (size_t k = 0; k < c.offsets.size(); ++k) os << (k ? ", " : "") << rat_str(c.offsets[k]);
  os << ")";
  const Matrix id = Matrix::identity(c.basis.layer(), c.basis.rows());
  if (!(c.basis == id)) os << " on basis " << c.basis.str();
  return os.str();
}

std::string rat_list(const std::vector<Rat>& v) {
  std::ostringstream os;
  os << "{";
  for (size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << rat_str(v[k]);
  os << "}";
  return os.str();
}

Scenario load_scenario(const std::string& arg, long prime) {
  Scenario sc;
  if (arg.size() > 5 && arg.compare(arg.size() - 5, 5, ".json") == 0) {
    std::ifstream in(arg);
    if (!in) fail(Err::BadInput, "cannot open scenario file: " + arg);
    sc = scenario_from_json(Json::parse(in));
  } else {
    sc = catalog_scenario(arg);
  }
  if (prime > 0 && prime != sc.p) {
    sc.p = prime;
    sc.expected_diag.clear();  // frozen expectations assume the scenario prime
  }
  return sc;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) fail(Err::BadInput, "cannot write: " + path);
  out << j.dump(2) << "\n";
}

void zero_millis(std::vector<Report>& reps) {
  for (Report& r : reps) r.millis = 0;
}

int print_reports(const std::vector<Report>& reps) {
  bool all = true;
  for (const Report& r : reps) {
    std::printf("%s — %s (%lld ms)%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.millis,
                r.witness.empty() ? "" : " :: ", r.witness.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

Json reports_json(const std::string& target, const std::vector<Report>& reps) {
  bool all = true;
  Json arr = Json::array();
  for (const Report& r : reps) {
    all = all && r.pass;
    arr.push_back(report_json(r));
  }
  Json j;
  j["target"] = target;
  j["pass"] = all;
  j["reports"] = arr;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"buildings of classical groups as self-dual lattice functions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string target, json_path, out_path, write_dir, radius_arg;
  long prime = 0;
  unsigned seed = 20260815u;
  bool stable = false;
  int grid_den = 0;
  int depth = 1;

  app.add_option("--prime", prime, "override the scenario prime");
  app.add_option("--json", json_path, "write a JSON report to this path");
  app.add_option("--seed", seed, "seed for the randomized checks");
  app.add_flag("--stable", stable, "zero out timings for byte-stable output");

  CLI::App* c_cat = app.add_subcommand("catalog", "list the built-in scenarios");
  c_cat->add_option("--write-dir", write_dir, "write each scenario as <dir>/<name>.json");

  CLI::App* c_dec = app.add_subcommand("decompose", "block decomposition of the scenario element");
  c_dec->add_option("scenario", target, "catalog name or scenario .json path")->required();

  CLI::App* c_emb =
      app.add_subcommand("embed", "embed the scenario point into the ambient building");
  c_emb->add_option("scenario", target, "catalog name or scenario .json path")->required();

  CLI::App* c_fil =
      app.add_subcommand("filtration", "compare block filtrations against the ambient cuts");
  c_fil->add_option("scenario", target, "catalog name or scenario .json path")->required();

  CLI::App* c_chk =
      app.add_subcommand("check", "run scenario checks, or every numbered criterion with 'all'");
  c_chk->add_option("scenario", target, "catalog name, scenario .json path, or 'all'")->required();

  CLI::App* c_src = app.add_subcommand(
      "search-unique", "grid search for building points compatible with the block filtrations");
  c_src->add_option("scenario", target, "catalog name or scenario .json path")->required();
  c_src->add_option("--grid-denominator", grid_den, "grid denominator N (default: scenario grid)");
  c_src->add_option("--radius", radius_arg, "grid radius as a rational (default: scenario grid)");

  CLI::App* c_tre =
      app.add_subcommand("export-tree", "DOT export of the rank-one lattice-class tree");
  c_tre->add_option("scenario", target, "catalog name or scenario .json path")->required();
  c_tre->add_option("--depth", depth, "ball radius around the standard class (default 1)");
  c_tre->add_option("--out", out_path, "write the graph to this path instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_cat->parsed()) {
      for (const Scenario& s : catalog()) {
        std::printf("%-16s %s, dimension %zu\n", s.name.c_str(),
                    s.gl ? "general linear" : "classical", s.beta.size());
        if (!write_dir.empty()) write_json_file(write_dir + "/" + s.name + ".json", scenario_json(s));
      }
      return 0;
    }

    if (c_dec->parsed()) {
      const Scenario sc = load_scenario(target, prime);
      const ScenarioData sd = realize(sc);
      std::printf("scenario %s: %s, dimension %d, %zu block(s)\n", sc.name.c_str(),
                  sd.D.gl ? "general linear" : "classical", sd.D.dim(), sd.D.blocks.size());
      for (size_t i = 0; i < sd.D.blocks.size(); ++i) {
        const CentralBlock& b = sd.D.blocks[i];
        std::printf("  block %zu: %-4s factor %s, field %s (e = %d), block dim %d\n", i + 1,
                    block_kind_name(b.kind).c_str(), poly_str(b.factor).c_str(),
                    b.E->name().c_str(), b.E->e(), b.dE);
      }
      if (!json_path.empty()) write_json_file(json_path, decomposition_json(sd.D));
      return 0;
    }

    if (c_emb->parsed()) {
      const Scenario sc = load_scenario(target, prime);
      const ScenarioData sd = realize(sc);
      const LatticeFunction y = embed_point(sd.D, sd.x);
      std::printf("scenario %s point:\n", sc.name.c_str());
      for (const BlockPoint& bp : sd.x.blocks)
        std::printf("  block %d (%s): %s, shift %s\n", bp.block + 1,
                    block_kind_name(sd.D.blocks[bp.block].kind).c_str(), offsets_str(bp.fn).c_str(),
                    rat_str(bp.shift).c_str());
      std::printf("ambient image: %s\n", offsets_str(y).c_str());
      if (!sd.sc.gl)
        std::printf("self-dual: %s\n", is_self_dual(sd.h, y) ? "yes" : "no");
      if (!json_path.empty()) {
        Json j;
        j["scenario"] = sc.name;
        j["point"] = point_json(sd.D, sd.x);
        j["image"] = fn_json(y);
        if (!sd.sc.gl) j["self_dual"] = is_self_dual(sd.h, y);
        write_json_file(json_path, j);
      }
      return 0;
    }

    if (c_fil->parsed()) {
      Scenario sc = load_scenario(target, prime);
      sc.checks = {"filtration"};
      std::vector<Report> reps = scenario_checks(sc, seed);
      if (stable) zero_millis(reps);
      const int rc = print_reports(reps);
      if (!json_path.empty()) write_json_file(json_path, reports_json(sc.name, reps));
      return rc;
    }

    if (c_chk->parsed()) {
      std::vector<Report> reps;
      if (target == "all") {
        reps = run_all_criteria(seed);
      } else {
        const Scenario sc = load_scenario(target, prime);
        reps = scenario_checks(sc, seed);
      }
      if (stable) zero_millis(reps);
      const int rc = print_reports(reps);
      if (!json_path.empty()) write_json_file(json_path, reports_json(target, reps));
      return rc;
    }

    if (c_src->parsed()) {
      const Scenario sc = load_scenario(target, prime);
      const ScenarioData sd = realize(sc);
      const int N = grid_den > 0 ? grid_den : sc.grid_den;
      Json j;
      j["scenario"] = sc.name;
      j["denominator"] = N;
      bool ok = false;
      if (sc.gl) {
        const GridSearch gs = search_unique_classes(sd, N);
        if (gs.coarse)
          std::printf("warning: GridTooCoarse — the embedded class is not on the 1/%d grid\n", N);
        std::printf("passing translation classes (0, d): %s\n", rat_list(gs.passing).c_str());
        ok = !gs.coarse && gs.passing.size() == 1 &&
             function_equal(
                 make_lattice_function(Matrix::identity(sd.F, 2), {Rat(0), gs.passing[0]}),
                 embed_point(sd.D, sd.x));
        j["passing"] = Json::array();
        for (const Rat& q : gs.passing) j["passing"].push_back(rat_str(q));
        j["coarse"] = gs.coarse;
      } else {
        const Rat R = radius_arg.empty() ? sc.grid_radius : Rat(radius_arg);
        j["radius"] = rat_str(R);
        const GridSearch gs = search_unique_compatible(sd, N, R, true);
        const GridSearch ctrl = search_unique_compatible(sd, N, R, false);
        if (gs.coarse)
          std::printf("warning: GridTooCoarse — the embedded point is not on the 1/%d grid\n", N);
        std::printf("passing points (s, -s) with the filtration condition: %s\n",
                    rat_list(gs.passing).c_str());
        std::printf("equivariance only (negative control): %s\n", rat_list(ctrl.passing).c_str());
        ok = !gs.coarse && gs.passing.size() == 1 &&
             function_equal(make_lattice_function(Matrix::identity(sd.F, 2),
                                                  {gs.passing[0], Rat(-gs.passing[0])}),
                            embed_point(sd.D, sd.x));
        j["passing"] = Json::array();
        for (const Rat& q : gs.passing) j["passing"].push_back(rat_str(q));
        j["control"] = Json::array();
        for (const Rat& q : ctrl.passing) j["control"].push_back(rat_str(q));
        j["coarse"] = gs.coarse;
      }
      std::printf("%s — unique compatible point\n", ok ? "PASS" : "FAIL");
      j["pass"] = ok;
      if (!json_path.empty()) write_json_file(json_path, j);
      return ok ? 0 : 1;
    }

    if (c_tre->parsed()) {
      const Scenario sc = load_scenario(target, prime);
      const ScenarioData sd = realize(sc);
      const std::string dot = export_rank1_tree(sd, depth);
      if (out_path.empty()) {
        std::fputs(dot.c_str(), stdout);
      } else {
        std::ofstream out(out_path);
        if (!out) fail(Err::BadInput, "cannot write: " + out_path);
        out << dot;
      }
      return 0;
    }
  } catch (const Error& err) {
    std::fprintf(stderr, "error [%s]: %s\n", err_name(err.code()), err.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error [BadInput]: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
