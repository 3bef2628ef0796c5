#include "wcl/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace wcl {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& what, ordered_json context) {
  throw Error(ErrorCode::ParseError, what, std::move(context));
}

double need_number(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    parse_fail(std::string("expected a numeric field '") + key + "'",
               {{"field", key}});
  return j.at(key).get<double>();
}

bool need_bool(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_boolean())
    parse_fail(std::string("expected a boolean field '") + key + "'",
               {{"field", key}});
  return j.at(key).get<bool>();
}

std::string need_string(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    parse_fail(std::string("expected a string field '") + key + "'",
               {{"field", key}});
  return j.at(key).get<std::string>();
}

const ordered_json& need_array(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    parse_fail(std::string("expected an array field '") + key + "'",
               {{"field", key}});
  return j.at(key);
}

bool nonneg_integer(const ordered_json& v) {
  return v.is_number_unsigned() ||
         (v.is_number_integer() && v.get<long long>() >= 0);
}

std::vector<std::size_t> index_vector(const ordered_json& arr,
                                      const char* what) {
  std::vector<std::size_t> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!nonneg_integer(v))
      parse_fail(std::string(what) + " must hold non-negative integers",
                 {{"value", v}});
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::vector<double> number_vector(const ordered_json& arr, const char* what) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number())
      parse_fail(std::string(what) + " must hold numbers", {{"value", v}});
    out.push_back(v.get<double>());
  }
  return out;
}

ordered_json point_ref_json(const PointRef& p) {
  if (p.is_interior()) return p.index;
  if (p.is_infinity()) return "inf";
  return nullptr;
}

PointRef point_ref_from_json(const ordered_json& v) {
  if (v.is_null()) return PointRef::undefined();
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return PointRef::infinity();
    parse_fail("symbol entries must be an index, \"inf\", or null",
               {{"value", v}});
  }
  if (nonneg_integer(v)) return PointRef::interior(v.get<std::size_t>());
  parse_fail("symbol entries must be an index, \"inf\", or null",
             {{"value", v}});
}

ordered_json index_json(const std::vector<std::size_t>& v) {
  return ordered_json(v);
}

ordered_json sig12_array(const std::vector<double>& v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(sig12(x));
  return arr;
}

ordered_json space_embed(const SpacePtr& s) {
  return s ? space_to_json(*s) : ordered_json(nullptr);
}

}  // namespace

double sig12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

ordered_json space_to_json(const Space& s) {
  ordered_json j;
  ordered_json pts = ordered_json::array();
  for (const Point& p : s.points) {
    ordered_json c = ordered_json::array();
    c.push_back(p.x);
    if (s.dim == 2) c.push_back(p.y);
    pts.push_back(std::move(c));
  }
  j["points"] = std::move(pts);
  j["mesh"] = s.mesh;
  ordered_json ex = ordered_json::array();
  for (const auto& level : s.exhaustion) ex.push_back(index_json(level));
  j["exhaustion"] = std::move(ex);
  j["is_compact_model"] = s.is_compact_model;
  ordered_json tails = ordered_json::array();
  for (const Tail& t : s.tails) {
    ordered_json tj;
    tj["label"] = t.label;
    tj["direction"] = t.direction;
    tj["indices"] = index_json(t.indices);
    tails.push_back(std::move(tj));
  }
  j["tails"] = std::move(tails);
  return j;
}

SpacePtr space_from_json(const ordered_json& j) {
  if (!j.is_object()) parse_fail("space document must be an object", {});
  Space s;
  const ordered_json& pts = need_array(j, "points");
  if (pts.empty()) parse_fail("space has no points", {});
  if (!pts.front().is_array() || pts.front().empty() || pts.front().size() > 2)
    parse_fail("point entries must be coordinate arrays of length 1 or 2", {});
  s.dim = static_cast<int>(pts.front().size());
  s.points.reserve(pts.size());
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != static_cast<std::size_t>(s.dim))
      parse_fail("point entries must share one dimension", {{"value", p}});
    Point pt;
    if (!p[0].is_number()) parse_fail("coordinates must be numbers", {});
    pt.x = p[0].get<double>();
    if (s.dim == 2) {
      if (!p[1].is_number()) parse_fail("coordinates must be numbers", {});
      pt.y = p[1].get<double>();
    }
    s.points.push_back(pt);
  }
  s.mesh = need_number(j, "mesh");
  for (const auto& level : need_array(j, "exhaustion")) {
    if (!level.is_array()) parse_fail("exhaustion levels must be arrays", {});
    s.exhaustion.push_back(index_vector(level, "exhaustion levels"));
  }
  s.is_compact_model = need_bool(j, "is_compact_model");
  for (const auto& tj : need_array(j, "tails")) {
    if (!tj.is_object()) parse_fail("tail entries must be objects", {});
    Tail t;
    t.label = need_string(tj, "label");
    const double dir = need_number(tj, "direction");
    if (dir != 1.0 && dir != -1.0)
      parse_fail("tail direction must be +1 or -1", {{"value", dir}});
    t.direction = static_cast<int>(dir);
    t.indices = index_vector(need_array(tj, "indices"), "tail indices");
    s.tails.push_back(std::move(t));
  }
  validate(s);
  return std::make_shared<const Space>(std::move(s));
}

ordered_json function_to_json(const ScalarFunction& f,
                              const std::string& space_id) {
  ordered_json j;
  j["space_id"] = space_id;
  j["values"] = ordered_json(f.values);
  return j;
}

ScalarFunction function_from_json(const ordered_json& j,
                                  const SpacePtr& space) {
  if (!j.is_object()) parse_fail("function document must be an object", {});
  need_string(j, "space_id");
  std::vector<double> values =
      number_vector(need_array(j, "values"), "function values");
  if (values.size() != space->size())
    parse_fail("function length does not match its space",
               {{"values", values.size()}, {"space", space->size()}});
  return ScalarFunction{space, std::move(values)};
}

ordered_json symbol_to_json(const Symbol& sym) {
  ordered_json j;
  ordered_json phi = ordered_json::array();
  for (const PointRef& p : sym.phi) phi.push_back(point_ref_json(p));
  j["phi"] = std::move(phi);
  j["h"] = ordered_json(sym.h);
  return j;
}

Symbol symbol_from_json(const ordered_json& j) {
  if (!j.is_object()) parse_fail("symbol document must be an object", {});
  Symbol sym;
  for (const auto& v : need_array(j, "phi"))
    sym.phi.push_back(point_ref_from_json(v));
  sym.h = number_vector(need_array(j, "h"), "symbol weights");
  if (sym.h.size() != sym.phi.size())
    parse_fail("phi and h must have equal length",
               {{"phi", sym.phi.size()}, {"h", sym.h.size()}});
  return sym;
}

ordered_json operator_to_json(const LinearOperator& op,
                              const std::string& domain_id,
                              const std::string& codomain_id) {
  ordered_json j;
  j["domain_id"] = domain_id;
  j["codomain_id"] = codomain_id;
  if (op.is_matrix()) {
    j["backing"] = "matrix";
    const Matrix& m = op.matrix();
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
      ordered_json row = ordered_json::array();
      for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  } else {
    j["backing"] = "wc";
    j["symbol"] = symbol_to_json(op.symbol());
  }
  return j;
}

LinearOperator operator_from_json(const ordered_json& j,
                                  const SpacePtr& domain,
                                  const SpacePtr& codomain) {
  if (!j.is_object()) parse_fail("operator document must be an object", {});
  const std::string backing = need_string(j, "backing");
  if (backing == "matrix") {
    const ordered_json& rows = need_array(j, "matrix");
    if (rows.size() != codomain->size())
      parse_fail("matrix row count does not match the codomain",
                 {{"rows", rows.size()}, {"codomain", codomain->size()}});
    Matrix m(codomain->size(), domain->size());
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (!rows[r].is_array() || rows[r].size() != m.cols)
        parse_fail("matrix rows must match the domain size", {{"row", r}});
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (!rows[r][c].is_number())
          parse_fail("matrix entries must be numbers",
                     {{"row", r}, {"col", c}});
        m.at(r, c) = rows[r][c].get<double>();
      }
    }
    return make_matrix_operator(domain, codomain, std::move(m));
  }
  if (backing == "wc") {
    if (!j.contains("symbol"))
      parse_fail("wc operators need a symbol field", {});
    Symbol sym = symbol_from_json(j.at("symbol"));
    if (sym.size() != codomain->size())
      parse_fail("symbol length does not match the codomain",
                 {{"symbol", sym.size()}, {"codomain", codomain->size()}});
    for (std::size_t y = 0; y < sym.size(); ++y)
      if (sym.phi[y].is_interior() && sym.phi[y].index >= domain->size())
        parse_fail("symbol maps outside the domain",
                   {{"row", y}, {"index", sym.phi[y].index}});
    return LinearOperator{domain, codomain, std::move(sym)};
  }
  parse_fail("backing must be \"matrix\" or \"wc\"", {{"value", backing}});
}

ordered_json continuity_to_json(const ContinuityReport& r) {
  ordered_json j;
  j["verdict"] = r.continuous ? "continuous" : "not_continuous";
  ordered_json witnesses = ordered_json::array();
  if (r.witness) {
    witnesses.push_back({{"kind", "modulus_violation"},
                         {"y_a", r.witness->y_a},
                         {"y_b", r.witness->y_b},
                         {"dist_y", sig12(r.witness->dist_y)},
                         {"dist_x", sig12(r.witness->dist_x)}});
  }
  j["witnesses"] = std::move(witnesses);
  j["residuals"] = ordered_json::object();
  return j;
}

ordered_json properness_to_json(const PropernessReport& r) {
  ordered_json j;
  j["verdict"] = r.proper ? "proper" : "not_proper";
  ordered_json witnesses = ordered_json::array();
  if (r.witness) {
    witnesses.push_back({{"kind", "escaping_preimage"},
                         {"x_level", r.witness->x_level},
                         {"escaping", index_json(r.witness->escaping)},
                         {"tail_label", r.witness->tail_label}});
  }
  j["witnesses"] = std::move(witnesses);
  j["residuals"] = ordered_json::object();
  return j;
}

ordered_json isometry_to_json(const IsometryReport& r) {
  ordered_json j;
  j["verdict"] = r.isometry ? "isometry" : "not_isometry";
  ordered_json witnesses = ordered_json::array();
  if (r.bad_row)
    witnesses.push_back(
        {{"kind", "row_norm_above_one"}, {"row", *r.bad_row}});
  if (r.uncovered_column)
    witnesses.push_back(
        {{"kind", "column_without_unit_row"}, {"column", *r.uncovered_column}});
  j["witnesses"] = std::move(witnesses);
  j["residuals"] = ordered_json::object();
  if (r.definitional) j["definitional"] = *r.definitional;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

ordered_json dp_to_json(const DPReport& r) {
  ordered_json j;
  j["verdict"] = r.preserving ? "preserving" : "not_preserving";
  ordered_json witnesses = ordered_json::array();
  if (r.witness) {
    witnesses.push_back({{"kind", "row_reads_two_samples"},
                         {"row", r.witness->row},
                         {"col_a", r.witness->col_a},
                         {"col_b", r.witness->col_b}});
  }
  j["witnesses"] = std::move(witnesses);
  j["residuals"] = ordered_json::object();
  return j;
}

ordered_json injection_to_json(const InjectionReport& r) {
  ordered_json j;
  j["verdict"] = r.injective ? "injective" : "not_injective";
  ordered_json witnesses = ordered_json::array();
  if (r.witness_index)
    witnesses.push_back(
        {{"kind", "annihilated_sample"}, {"index", *r.witness_index}});
  if (!r.injective && !r.reason.empty())
    witnesses.push_back({{"kind", "reason"}, {"detail", r.reason}});
  j["witnesses"] = std::move(witnesses);
  j["residuals"] = {{"lower_gain", sig12(r.lower_gain)},
                    {"upper_gain", sig12(r.upper_gain)}};
  j["route"] = r.route;
  return j;
}

ordered_json quotient_to_json(const QuotientReport& r) {
  ordered_json j;
  j["verdict"] = r.quotient ? "quotient" : "not_quotient";
  ordered_json witnesses = ordered_json::array();
  if (r.missing_index)
    witnesses.push_back(
        {{"kind", "unreached_sample"}, {"index", *r.missing_index}});
  j["witnesses"] = std::move(witnesses);
  j["residuals"] = ordered_json::object();
  j["checks"] = {{"surjective", r.surjective},
                 {"continuous", r.continuous},
                 {"proper", r.proper}};
  return j;
}

ordered_json open_map_to_json(const OpenMapReport& r) {
  ordered_json j;
  j["verdict"] = r.open ? "open" : "not_open";
  ordered_json witnesses = ordered_json::array();
  if (r.witness) {
    witnesses.push_back({{"kind", "non_open_ball_image"},
                         {"center", r.witness->center},
                         {"radius", sig12(r.witness->radius)},
                         {"region", index_json(r.witness->region)},
                         {"p", r.witness->p},
                         {"image", r.witness->image},
                         {"missing", r.witness->missing}});
  }
  j["witnesses"] = std::move(witnesses);
  j["residuals"] = ordered_json::object();
  return j;
}

ordered_json isometry_recovery_to_json(const IsometryRecovery& r) {
  ordered_json j;
  j["verdict"] = "recovered";
  j["witnesses"] = ordered_json::array();
  j["residuals"] = {{"max_residual", sig12(r.max_residual)},
                    {"support_violation", sig12(r.support_violation)}};
  j["y1"] = index_json(r.y1);
  j["symbol"] = symbol_to_json(r.symbol);
  ordered_json peaks = ordered_json::array();
  for (const auto& q : r.peaks.q) peaks.push_back(index_json(q));
  j["peak_sets"] = std::move(peaks);
  return j;
}

ordered_json decomposition_to_json(const Decomposition& r) {
  ordered_json j;
  j["verdict"] = "decomposed";
  j["witnesses"] = ordered_json::array();
  j["residuals"] = {{"max_residual", sig12(r.max_residual)},
                    {"y3_max", sig12(r.y3_max)}};
  j["y1"] = index_json(r.y1);
  j["y2"] = index_json(r.y2);
  j["y3"] = index_json(r.y3);
  j["symbol"] = symbol_to_json(r.symbol);
  ordered_json f_set = ordered_json::array();
  for (const PointRef& p : r.f_set) f_set.push_back(point_ref_json(p));
  j["f_set"] = std::move(f_set);
  ordered_json blowup = ordered_json::array();
  for (const BlowupSeries& b : r.blowup_evidence) {
    blowup.push_back({{"y", b.y},
                      {"norms", sig12_array(b.norms)},
                      {"slope", sig12(b.slope)}});
  }
  j["blowup"] = std::move(blowup);
  return j;
}

ordered_json bijective_to_json(const BijectiveRecovery& r) {
  ordered_json j;
  j["verdict"] = "bijective";
  j["witnesses"] = ordered_json::array();
  j["residuals"] = ordered_json::object();
  j["symbol"] = symbol_to_json(r.symbol);
  j["inverse"] = symbol_to_json(r.inverse);
  return j;
}

ordered_json extension_to_json(const ExtensionReport& r) {
  ordered_json j;
  j["verdict"] = r.extendable ? "extendable" : "obstructed";
  ordered_json witnesses = ordered_json::array();
  for (const TailLimit& t : r.h_tail_limits) {
    witnesses.push_back({{"kind", "tail_limit"},
                         {"label", t.label},
                         {"value", sig12(t.value)},
                         {"spread", sig12(t.spread)}});
  }
  j["witnesses"] = std::move(witnesses);
  j["residuals"] = {{"limit_gap", sig12(r.limit_gap)},
                    {"g_bound", sig12(r.g_bound)}};
  j["mode"] = r.mode;
  ordered_json limits = ordered_json::array();
  for (const TailLimit& t : r.h_tail_limits) {
    limits.push_back({{"label", t.label},
                      {"value", sig12(t.value)},
                      {"spread", sig12(t.spread)}});
  }
  j["h_tail_limits"] = std::move(limits);
  if (r.extendable) {
    j["extension"] = {{"symbol", symbol_to_json(r.extension)},
                      {"domain", space_embed(r.domain_ext)},
                      {"codomain", space_embed(r.codomain_ext)}};
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

ordered_json obstruction_to_json(const ObstructionReport& r) {
  ordered_json j;
  j["verdict"] = r.contradiction ? "obstructed" : "consistent";
  j["witnesses"] = ordered_json::array();
  j["residuals"] = {{"limit_gap", sig12(r.limit_gap)},
                    {"g_bound", sig12(r.g_bound)},
                    {"mirror_product_max", sig12(r.mirror_product_max)},
                    {"margin", sig12(r.margin)}};
  j["variant"] = r.variant;
  j["radius"] = r.radius;
  j["cells"] = r.cells;
  j["determined_radius"] = sig12(r.determined_radius);
  j["t1_limit_pos"] = sig12(r.t1_limit_pos);
  j["t1_limit_neg"] = sig12(r.t1_limit_neg);
  j["limit_gap"] = sig12(r.limit_gap);
  j["g_bound_pos"] = sig12(r.g_bound_pos);
  j["g_bound_neg"] = sig12(r.g_bound_neg);
  j["l_bar"] = sig12(r.l_bar);
  j["margin"] = sig12(r.margin);
  j["contradiction"] = r.contradiction;
  return j;
}

ordered_json error_to_json(const Error& e) {
  ordered_json j;
  j["verdict"] = "error";
  j["code"] = to_string(e.code());
  j["message"] = e.what();
  j["witnesses"] = ordered_json::array();
  if (!e.detail().is_null() && !e.detail().empty())
    j["witnesses"].push_back(e.detail());
  j["residuals"] = ordered_json::object();
  return j;
}

ordered_json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot read file",
                {{"path", path.string()}});
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ordered_json::parse(buf.str());
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what(), {{"path", path.string()}});
  }
}

void save_json(const ordered_json& j, const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write file",
                {{"path", path.string()}});
  out << j.dump(2) << '\n';
  if (!out)
    throw Error(ErrorCode::IoError, "write failed", {{"path", path.string()}});
}

SpacePtr load_space(const std::filesystem::path& path) {
  return space_from_json(load_json(path));
}

void save_space(const Space& s, const std::filesystem::path& path) {
  save_json(space_to_json(s), path);
}

LinearOperator load_operator(const std::filesystem::path& path) {
  const ordered_json j = load_json(path);
  if (!j.is_object()) parse_fail("operator document must be an object", {});
  const std::string domain_id = need_string(j, "domain_id");
  const std::string codomain_id = need_string(j, "codomain_id");
  const std::filesystem::path dir = path.parent_path();
  const SpacePtr domain = load_space(dir / (domain_id + ".json"));
  const SpacePtr codomain = load_space(dir / (codomain_id + ".json"));
  return operator_from_json(j, domain, codomain);
}

void save_operator(const LinearOperator& op, const std::filesystem::path& path,
                   const std::string& domain_id,
                   const std::string& codomain_id) {
  const std::filesystem::path dir = path.parent_path();
  save_space(*op.domain, dir / (domain_id + ".json"));
  save_space(*op.codomain, dir / (codomain_id + ".json"));
  save_json(operator_to_json(op, domain_id, codomain_id), path);
}

}  // namespace wcl
