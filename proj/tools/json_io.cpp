#include "json_io.hpp"

namespace btlf {

namespace {

// An element prints as a plain rational whenever the higher monomial
// coordinates vanish, and as the full coordinate array otherwise.
Json felem_json(const FElem& x) {
  bool flat = true;
  for (size_t c = 1; c < x.c.size(); ++c) flat = flat && x.c[c] == 0;
  if (flat) return rat_str(x.c.empty() ? Rat(0) : x.c[0]);
  Json a = Json::array();
  for (const Rat& q : x.c) a.push_back(rat_str(q));
  return a;
}

std::vector<Rat> coords_from_json(const Json& j) {
  std::vector<Rat> out;
  if (j.is_array()) {
    for (const Json& el : j) out.push_back(rat_from_json(el));
  } else {
    out.push_back(rat_from_json(j));
  }
  return out;
}

}  // namespace

Json rat_json(const Rat& q) { return rat_str(q); }

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    try {
      return Rat(s);
    } catch (const std::exception&) {
      fail(Err::BadInput, "not a rational: '" + s + "'");
    }
  }
  fail(Err::BadInput, "expected a rational as a string or integer");
}

Json fn_json(const LatticeFunction& lf) {
  const LatticeFunction c = canonicalize(lf);
  Json basis = Json::array();
  for (int i = 0; i < c.basis.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < c.basis.cols(); ++j) row.push_back(felem_json(c.basis.at(i, j)));
    basis.push_back(row);
  }
  Json offs = Json::array();
  for (const Rat& q : c.offsets) offs.push_back(rat_str(q));
  Json out;
  out["basis"] = basis;
  out["offsets"] = offs;
  return out;
}

Json point_json(const BetaDecomposition& D, const CentralBuildingPoint& x) {
  Json blocks = Json::array();
  for (const BlockPoint& bp : x.blocks) {
    Json b;
    b["i"] = bp.block + 1;  // block indices are 1-based on the wire
    b["kind"] = block_kind_name(D.blocks[bp.block].kind);
    b["function"] = fn_json(bp.fn);
    b["shift"] = rat_str(bp.shift);
    blocks.push_back(b);
  }
  Json out;
  out["blocks"] = blocks;
  return out;
}

Json decomposition_json(const BetaDecomposition& D) {
  Json blocks = Json::array();
  for (const CentralBlock& b : D.blocks) {
    Json jb;
    jb["kind"] = block_kind_name(b.kind);
    Json fac = Json::array();
    for (const FElem& cf : b.factor) fac.push_back(felem_json(cf));
    jb["factor"] = fac;
    jb["field"] = b.E->name();
    jb["field_degree"] = b.E->deg();
    jb["ramification"] = b.E->e();
    jb["block_dim"] = b.dE;
    if (b.kind == BlockKind::Jpair) jb["partner_field"] = b.Eminus->name();
    blocks.push_back(jb);
  }
  Json out;
  out["kind"] = D.gl ? "gl" : "classical";
  out["dimension"] = D.dim();
  out["blocks"] = blocks;
  return out;
}

Json report_json(const Report& rep) {
  Json j;
  j["name"] = rep.name;
  j["verdict"] = rep.pass ? "pass" : "fail";
  if (!rep.witness.empty()) j["witness"] = rep.witness;
  j["millis"] = rep.millis;
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario sc;
  sc.name = j.value("name", std::string("scenario"));
  sc.p = j.value("prime", static_cast<long>(3));
  const std::string kind = j.value("kind", std::string("classical"));
  if (kind == "gl") {
    sc.gl = true;
  } else if (kind != "classical") {
    fail(Err::BadInput, "scenario kind must be 'classical' or 'gl'");
  }
  if (j.contains("tower"))
    for (const Json& el : j.at("tower")) sc.tower.push_back(rat_from_json(el));
  if (!sc.gl) {
    const std::string sig = j.value("sigma", std::string("identity"));
    if (sig == "conjugation") {
      sc.conj_sigma = true;
    } else if (sig != "identity") {
      fail(Err::BadInput, "sigma must be 'identity' or 'conjugation'");
    }
    sc.eps = j.value("eps", 1);
    for (const Json& row : j.at("gram")) {
      std::vector<Rat> r;
      for (const Json& el : row) r.push_back(rat_from_json(el));
      sc.gram.push_back(std::move(r));
    }
  }
  for (const Json& row : j.at("beta")) {
    std::vector<std::vector<Rat>> r;
    for (const Json& el : row) r.push_back(coords_from_json(el));
    sc.beta.push_back(std::move(r));
  }
  for (const Json& jb : j.at("point").at("blocks")) {
    Scenario::PointBlock pb;
    pb.i = jb.at("i").get<int>() - 1;
    pb.kind = jb.at("kind").get<std::string>();
    for (const Json& el : jb.at("function").at("offsets")) pb.offsets.push_back(rat_from_json(el));
    pb.shift = jb.contains("shift") ? rat_from_json(jb.at("shift")) : Rat(0);
    sc.point.push_back(std::move(pb));
  }
  if (j.contains("grid")) {
    sc.grid_den = j.at("grid").value("denominator", 8);
    if (j.at("grid").contains("radius")) sc.grid_radius = rat_from_json(j.at("grid").at("radius"));
  }
  sc.samples = j.value("samples", 20);
  if (j.contains("expected"))
    for (const Json& el : j.at("expected")) sc.expected_diag.push_back(rat_from_json(el));
  if (j.contains("checks")) {
    for (const Json& el : j.at("checks")) sc.checks.push_back(el.get<std::string>());
  } else {
    sc.checks = {"decompose", "embed", "filtration"};
  }
  return sc;
}

Json scenario_json(const Scenario& sc) {
  Json j;
  j["name"] = sc.name;
  j["prime"] = sc.p;
  j["kind"] = sc.gl ? "gl" : "classical";
  Json tw = Json::array();
  for (const Rat& d : sc.tower) tw.push_back(rat_str(d));
  j["tower"] = tw;
  if (!sc.gl) {
    j["sigma"] = sc.conj_sigma ? "conjugation" : "identity";
    j["eps"] = sc.eps;
    Json g = Json::array();
    for (const auto& row : sc.gram) {
      Json r = Json::array();
      for (const Rat& q : row) r.push_back(rat_str(q));
      g.push_back(r);
    }
    j["gram"] = g;
  }
  Json b = Json::array();
  for (const auto& row : sc.beta) {
    Json r = Json::array();
    for (const std::vector<Rat>& coords : row) {
      bool flat = true;
      for (size_t c = 1; c < coords.size(); ++c) flat = flat && coords[c] == 0;
      if (flat) {
        r.push_back(rat_str(coords.empty() ? Rat(0) : coords[0]));
      } else {
        Json a = Json::array();
        for (const Rat& q : coords) a.push_back(rat_str(q));
        r.push_back(a);
      }
    }
    b.push_back(r);
  }
  j["beta"] = b;
  Json blocks = Json::array();
  for (const Scenario::PointBlock& pb : sc.point) {
    Json jb;
    jb["i"] = pb.i + 1;
    jb["kind"] = pb.kind;
    Json offs = Json::array();
    for (const Rat& q : pb.offsets) offs.push_back(rat_str(q));
    jb["function"] = Json{{"offsets", offs}};
    jb["shift"] = rat_str(pb.shift);
    blocks.push_back(jb);
  }
  j["point"] = Json{{"blocks", blocks}};
  Json grid;
  grid["denominator"] = sc.grid_den;
  grid["radius"] = rat_str(sc.grid_radius);
  j["grid"] = grid;
  j["samples"] = sc.samples;
  if (!sc.expected_diag.empty()) {
    Json ex = Json::array();
    for (const Rat& q : sc.expected_diag) ex.push_back(rat_str(q));
    j["expected"] = ex;
  }
  Json ch = Json::array();
  for (const std::string& c : sc.checks) ch.push_back(c);
  j["checks"] = ch;
  return j;
}

}  // namespace btlf
