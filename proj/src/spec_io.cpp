#include "hawkes_ls/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "hawkes_ls/detail/overloaded.hpp"
#include "hawkes_ls/error.hpp"

namespace hawkes_ls {

using detail::Overloaded;
using nlohmann::json;

namespace {

void expect_keys(const json& doc, std::string_view what, std::initializer_list<const char*> keys) {
  if (!doc.is_object()) throw InvalidSpec(std::string(what) + ": expected a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key))
      throw InvalidSpec(std::string(what) + ": unknown key \"" + key + "\"");
  }
  for (const char* key : keys) {
    if (!doc.contains(key))
      throw InvalidSpec(std::string(what) + ": missing key \"" + key + "\"");
  }
}

double number(const json& doc, const char* key, std::string_view what) {
  const json& v = doc.at(key);
  if (!v.is_number())
    throw InvalidSpec(std::string(what) + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& doc, const char* key, std::string_view what) {
  const json& v = doc.at(key);
  if (!v.is_array())
    throw InvalidSpec(std::string(what) + ": \"" + key + "\" must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number())
      throw InvalidSpec(std::string(what) + ": \"" + key + "\" must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string type_tag(const json& doc, std::string_view what) {
  if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string())
    throw InvalidSpec(std::string(what) + ": expected an object with a string \"type\"");
  return doc.at("type").get<std::string>();
}

template <class T, class F>
PairMatrix<T> matrix_from_json(const json& doc, std::size_t p, std::string_view what, F parse) {
  if (!doc.is_array() || doc.size() != p)
    throw InvalidSpec(std::string(what) + ": expected a " + std::to_string(p) + "x" +
                      std::to_string(p) + " array");
  PairMatrix<T> out(p, T{});
  for (std::size_t k = 0; k < p; ++k) {
    const json& row = doc[k];
    if (!row.is_array() || row.size() != p)
      throw InvalidSpec(std::string(what) + ": row " + std::to_string(k) + " has wrong length");
    for (std::size_t l = 0; l < p; ++l) out(k, l) = parse(row[l]);
  }
  return out;
}

template <class T, class F>
json matrix_to_json(const PairMatrix<T>& m, F emit) {
  json out = json::array();
  for (std::size_t k = 0; k < m.dim(); ++k) {
    json row = json::array();
    for (std::size_t l = 0; l < m.dim(); ++l) row.push_back(emit(m(k, l)));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

json to_json(const ScalarCurve& curve) {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return json{{"type", "constant"}, {"c", c.c}}; },
          [](const Linear& l) { return json{{"type", "linear"}, {"a", l.a}, {"b", l.b}}; },
          [](const QuadraticDecay& q) {
            return json{{"type", "quadratic_decay"}, {"alpha0", q.alpha0}, {"eta", q.eta}};
          },
          [](const GaussianBump& g) {
            return json{{"type", "gaussian_bump"}, {"a", g.a}, {"c", g.c}, {"s", g.s}};
          },
          [](const Table& t) {
            return json{{"type", "table"}, {"knots", t.knots}, {"values", t.values}};
          },
      },
      curve.form());
}

json to_json(const Kernel& kernel) {
  return std::visit(
      Overloaded{
          [](const Exponential& e) {
            return json{{"type", "exponential"}, {"alpha", e.alpha}, {"beta", e.beta}};
          },
          [](const PowerLaw& k) {
            return json{
                {"type", "power_law"}, {"alpha", k.alpha}, {"gamma", k.gamma}, {"beta", k.beta}};
          },
          [](const GammaShape& k) {
            return json{
                {"type", "gamma"}, {"alpha", k.alpha}, {"gamma", k.gamma}, {"beta", k.beta}};
          },
          [](const Histogram& h) {
            return json{{"type", "histogram"}, {"width", h.width}, {"heights", h.heights}};
          },
      },
      kernel.form());
}

json to_json(const ModelSpec& spec) {
  json doc;
  doc["schema"] = std::string(kSpecSchema);
  doc["p"] = spec.p;
  doc["horizon"] = spec.horizon;
  json baseline = json::array();
  for (const auto& mu : spec.baseline) baseline.push_back(to_json(mu));
  doc["baseline"] = std::move(baseline);
  if (spec.scalar_reproduction && spec.p > 0) {
    doc["reproduction"] = to_json(spec.reproduction(0, 0));
  } else {
    doc["reproduction"] =
        matrix_to_json(spec.reproduction, [](const ScalarCurve& c) { return to_json(c); });
  }
  doc["kernel"] = matrix_to_json(spec.kernel, [](const Kernel& k) { return to_json(k); });
  return doc;
}

ScalarCurve curve_from_json(const json& doc) {
  const std::string type = type_tag(doc, "curve");
  const std::string what = "curve \"" + type + "\"";
  if (type == "constant") {
    expect_keys(doc, what, {"type", "c"});
    return ScalarCurve(Constant{number(doc, "c", what)});
  }
  if (type == "linear") {
    expect_keys(doc, what, {"type", "a", "b"});
    return ScalarCurve(Linear{number(doc, "a", what), number(doc, "b", what)});
  }
  if (type == "quadratic_decay") {
    expect_keys(doc, what, {"type", "alpha0", "eta"});
    return ScalarCurve(QuadraticDecay{number(doc, "alpha0", what), number(doc, "eta", what)});
  }
  if (type == "gaussian_bump") {
    expect_keys(doc, what, {"type", "a", "c", "s"});
    return ScalarCurve(GaussianBump{number(doc, "a", what), number(doc, "c", what), number(doc, "s", what)});
  }
  if (type == "table") {
    expect_keys(doc, what, {"type", "knots", "values"});
    return ScalarCurve(Table{numbers(doc, "knots", what), numbers(doc, "values", what)});
  }
  throw InvalidSpec("unknown curve type \"" + type + "\"");
}

Kernel kernel_from_json(const json& doc) {
  const std::string type = type_tag(doc, "kernel");
  const std::string what = "kernel \"" + type + "\"";
  if (type == "exponential") {
    expect_keys(doc, what, {"type", "alpha", "beta"});
    return Kernel(Exponential{number(doc, "alpha", what), number(doc, "beta", what)});
  }
  if (type == "power_law") {
    expect_keys(doc, what, {"type", "alpha", "gamma", "beta"});
    return Kernel(PowerLaw{number(doc, "alpha", what), number(doc, "gamma", what),
                    number(doc, "beta", what)});
  }
  if (type == "gamma") {
    expect_keys(doc, what, {"type", "alpha", "gamma", "beta"});
    return Kernel(GammaShape{number(doc, "alpha", what), number(doc, "gamma", what),
                      number(doc, "beta", what)});
  }
  if (type == "histogram") {
    expect_keys(doc, what, {"type", "width", "heights"});
    return Kernel(Histogram{number(doc, "width", what), numbers(doc, "heights", what)});
  }
  throw InvalidSpec("unknown kernel type \"" + type + "\"");
}

ModelSpec spec_from_json(const json& doc) {
  expect_keys(doc, "spec", {"schema", "p", "horizon", "baseline", "reproduction", "kernel"});
  if (!doc.at("schema").is_string() || doc.at("schema").get<std::string>() != kSpecSchema)
    throw InvalidSpec("spec: schema must be \"" + std::string(kSpecSchema) + "\"");
  const json& pj = doc.at("p");
  if (!pj.is_number_integer() || pj.get<long long>() < 1)
    throw InvalidSpec("spec: \"p\" must be a positive integer");
  const auto p = pj.get<std::size_t>();

  const json& baseline = doc.at("baseline");
  if (!baseline.is_array() || baseline.size() != p)
    throw InvalidSpec("spec: \"baseline\" must list p curves");
  std::vector<ScalarCurve> mu;
  for (const auto& c : baseline) mu.push_back(curve_from_json(c));

  KernelMatrix phi = matrix_from_json<Kernel>(doc.at("kernel"), p, "kernel", kernel_from_json);
  const double horizon = number(doc, "horizon", "spec");

  const json& g = doc.at("reproduction");
  ModelSpec spec =
      g.is_object()
          ? ModelSpec::with_scalar_g(horizon, std::move(mu), curve_from_json(g), std::move(phi))
          : ModelSpec::with_matrix_g(
                horizon, std::move(mu),
                matrix_from_json<ScalarCurve>(g, p, "reproduction", curve_from_json),
                std::move(phi));
  stability_summary(spec);  // structural checks only
  return spec;
}

ModelSpec spec_from_string(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidSpec(std::string("malformed JSON: ") + e.what());
  }
  return spec_from_json(doc);
}

ModelSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open spec file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return spec_from_string(buffer.str());
}

std::uint64_t spec_hash(const ModelSpec& spec) {
  const std::string canonical = to_json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace hawkes_ls
