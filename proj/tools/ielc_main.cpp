// ielc: batch front end for the lambda-IEL toolkit.
//
// Subcommands: check, norm, translate, kripke, cover. Every command accepts
// --json for a machine-readable report. Exit codes: 0 success/valid/typed,
// 1 refuted or ill-typed (with a report), 2 usage or resource errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ielc/coversys.hpp"
#include "ielc/kripke.hpp"
#include "ielc/metalang.hpp"
#include "ielc/parser.hpp"
#include "ielc/reduce.hpp"
#include "ielc/typecheck.hpp"

using nlohmann::json;
using namespace ielc;

namespace {

constexpr long long kDefaultFuel = 100000;

long long env_fuel() {
  if (const char* v = std::getenv("IELC_FUEL")) {
    char* end = nullptr;
    long long fuel = std::strtoll(v, &end, 10);
    if (end && *end == '\0' && fuel >= 0) return fuel;
    std::cerr << "warning: ignoring malformed IELC_FUEL\n";
  }
  return kDefaultFuel;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

Result<TermPtr, int> load_term(const std::string& path) {
  auto text = read_file(path);
  if (!text) return usage_error("cannot read '" + path + "'");
  auto t = parse_term(*text);
  if (!t) return usage_error(path + ":" + format_error(t.error()));
  return t.value();
}

Result<Context, int> load_context(const std::string& path) {
  if (path.empty()) return Context{};
  auto text = read_file(path);
  if (!text) return usage_error("cannot read '" + path + "'");
  auto ctx = parse_context(*text);
  if (!ctx) return usage_error(path + ":" + format_error(ctx.error()));
  return ctx.value();
}

json span_json(const SourceSpan& s) {
  return json{{"start", s.start}, {"end", s.end}, {"line", s.line},
              {"column", s.column}};
}

json site_json(const RedexSite& site) {
  json j{{"rule", rule_name(site.rule)}, {"path", site.path}};
  if (site.rule == Rule::LetFlatten) j["arg"] = site.arg;
  return j;
}

// ---------------------------------------------------------------- check

int cmd_check(const std::string& term_file, const std::string& ctx_file,
              bool as_json) {
  auto term = load_term(term_file);
  if (!term.ok()) return term.error();
  auto ctx = load_context(ctx_file);
  if (!ctx.ok()) return ctx.error();

  auto ty = infer(ctx.value(), term.value());
  if (as_json) {
    json out{{"command", "check"}, {"ok", ty.ok()}};
    if (ty.ok()) {
      out["type"] = print_type(ty.value());
    } else {
      out["error"] = describe(ty.error());
      if (ty.error().at) out["span"] = span_json(ty.error().at->span);
    }
    std::cout << out.dump() << "\n";
  } else if (ty.ok()) {
    std::cout << print_type(ty.value()) << "\n";
  } else {
    std::cout << "type error: " << describe(ty.error()) << "\n";
  }
  return ty.ok() ? 0 : 1;
}

// ---------------------------------------------------------------- norm

int cmd_norm(const std::string& term_file, bool trace, long long fuel,
             bool as_json) {
  auto term = load_term(term_file);
  if (!term.ok()) return term.error();

  bool typable = infer({}, term.value()).ok();
  if (!typable && !as_json)
    std::cerr << "warning: term does not typecheck in the empty context; "
                 "normalization may diverge\n";

  auto out = normalize(term.value(), fuel);
  const Trace& tr = out.ok() ? out.value() : out.error().partial;
  if (as_json) {
    json steps = json::array();
    for (const auto& s : tr.steps) {
      json st = site_json(s.site);
      st["term"] = print_term(s.before);
      steps.push_back(st);
    }
    json j{{"command", "norm"},
           {"ok", out.ok()},
           {"typable", typable},
           {"steps", steps}};
    if (out.ok()) j["normal_form"] = print_term(tr.result);
    else j["error"] = "fuel exhausted";
    std::cout << j.dump() << "\n";
  } else {
    if (trace) std::cout << format_trace(tr);
    std::cout << print_term(tr.result) << "\n";
    if (!out.ok())
      std::cerr << "error: fuel exhausted after " << tr.steps.size()
                << " steps\n";
  }
  return out.ok() ? 0 : 2;
}

// ---------------------------------------------------------------- translate

int cmd_translate(const std::string& term_file, const std::string& ctx_file,
                  bool check_typing, bool as_json) {
  auto term = load_term(term_file);
  if (!term.ok()) return term.error();
  auto ctx = load_context(ctx_file);
  if (!ctx.ok()) return ctx.error();

  MLTermPtr ml = translate_term(term.value());
  json j{{"command", "translate"}, {"term", print_ml_term(ml)}};
  std::optional<std::string> ml_ty;
  if (check_typing) {
    auto src = infer(ctx.value(), term.value());
    if (!src.ok()) {
      if (as_json) {
        j["ok"] = false;
        j["error"] = describe(src.error());
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "type error: " << describe(src.error()) << "\n";
      }
      return 1;
    }
    auto got = ml_infer(translate_context(ctx.value()), ml);
    if (!got.ok() || !ml_type_eq(got.value(), translate_type(src.value()))) {
      if (as_json) {
        j["ok"] = false;
        j["error"] = "translation typing mismatch";
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "error: translation typing mismatch\n";
      }
      return 1;
    }
    ml_ty = print_ml_type(got.value());
  }
  if (as_json) {
    j["ok"] = true;
    if (ml_ty) j["type"] = *ml_ty;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << print_ml_term(ml) << "\n";
    if (ml_ty) std::cout << "type: " << *ml_ty << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- kripke

json model_json(const Model& m, int world) {
  json leq = json::array(), e = json::array();
  for (int i = 0; i < m.frame.n; ++i)
    for (int k = 0; k < m.frame.n; ++k) {
      if (m.frame.leq[i] >> k & 1) leq.push_back(json::array({i, k}));
      if (m.frame.E[i] >> k & 1) e.push_back(json::array({i, k}));
    }
  json val = json::object();
  for (const auto& [name, mask] : m.valuation) {
    json ws = json::array();
    for (int i = 0; i < m.frame.n; ++i)
      if (mask >> i & 1) ws.push_back(i);
    val[name] = ws;
  }
  return json{{"worlds", m.frame.n}, {"leq", leq}, {"E", e},
              {"valuation", val}, {"world", world}};
}

int cmd_kripke(const std::string& mode, const std::string& formula_text,
               const std::string& logic_name, int max_worlds, bool as_json) {
  auto f = parse_formula(formula_text);
  if (!f.ok()) return usage_error("formula: " + format_error(f.error()));
  if (mode != "valid" && mode != "counter")
    return usage_error("kripke mode must be 'valid' or 'counter'");
  Logic logic;
  if (logic_name == "iel-") logic = Logic::IELMinus;
  else if (logic_name == "iel") logic = Logic::IEL;
  else return usage_error("--logic must be iel- or iel");
  if (max_worlds < 1 || max_worlds > 5)
    return usage_error("--max-worlds must be between 1 and 5");

  auto r = countermodel(f.value(), logic, max_worlds);
  if (!r.ok()) {
    std::cerr << "error: resource guard exceeded\n";
    return 2;
  }
  const auto& found = r.value();
  json j{{"command", "kripke"}, {"mode", mode},
         {"formula", print_formula(f.value())}, {"logic", logic_name},
         {"max_worlds", max_worlds}};
  if (mode == "valid") {
    j["valid"] = !found.has_value();
    if (found) j["countermodel"] = model_json(found->model, found->world);
    if (as_json) {
      std::cout << j.dump() << "\n";
    } else if (!found) {
      std::cout << "valid up to " << max_worlds << " worlds\n";
    } else {
      std::cout << "countermodel found:\n"
                << print_model(found->model, found->world);
    }
    return found ? 1 : 0;
  }
  j["found"] = found.has_value();
  if (found) j["countermodel"] = model_json(found->model, found->world);
  if (as_json) {
    std::cout << j.dump() << "\n";
  } else if (found) {
    std::cout << print_model(found->model, found->world);
  } else {
    std::cout << "no countermodel up to " << max_worlds << " worlds\n";
  }
  return found ? 0 : 1;
}

// ---------------------------------------------------------------- cover

json flags_json(const CoverFlags& fl) {
  return json{{"existence", fl.existence},
              {"transitivity", fl.transitivity},
              {"refinement", fl.refinement},
              {"cover", fl.cover},
              {"localic", fl.localic},
              {"strict", fl.strict},
              {"modal", fl.modal},
              {"prenuclear", fl.prenuclear},
              {"mult_prenuclear", fl.mult_prenuclear},
              {"mult_prenuclear_printed", fl.mult_prenuclear_printed},
              {"iel", fl.iel}};
}

void print_flag_lines(const CoverFlags& fl) {
  auto line = [](const char* name, bool v) {
    std::cout << name << "=" << (v ? "true" : "false") << "\n";
  };
  line("cover", fl.cover);
  line("localic", fl.localic);
  line("strict", fl.strict);
  line("modal", fl.modal);
  line("prenuclear", fl.prenuclear);
  line("mult_prenuclear", fl.mult_prenuclear);
  line("mult_prenuclear_printed", fl.mult_prenuclear_printed);
  line("iel", fl.iel);
  for (const auto& n : fl.notes) std::cout << "note: " << n << "\n";
}

std::string mask_members(Mask m, int n, const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < n; ++i)
    if (m >> i & 1) {
      if (!first) out += ",";
      out += i < static_cast<int>(names.size()) ? names[i] : std::to_string(i);
      first = false;
    }
  return out + "}";
}

void print_operator_lines(const OperatorFlags& opf) {
  auto line = [](const char* name, bool v) {
    std::cout << name << "=" << (v ? "true" : "false") << "\n";
  };
  line("monotone", opf.monotone);
  line("inflationary", opf.inflationary);
  line("prenucleus", opf.prenucleus);
  line("multiplicative", opf.multiplicative);
  line("dense", opf.dense);
  line("nucleus", opf.nucleus);
}

int cover_represent(const std::string& path, const std::string& text,
                    bool as_json, json& j) {
  auto raw = locale_from_json(text);
  if (!raw.ok()) return usage_error(path + ": " + raw.error());
  auto lat = make_lattice(raw.value());
  if (!lat.ok()) {
    if (as_json) {
      j["ok"] = false;
      j["error"] = describe(lat.error());
      std::cout << j.dump() << "\n";
    } else {
      std::cout << "invalid locale: " << describe(lat.error()) << "\n";
    }
    return 1;
  }
  auto rep = representation_iso(lat.value());
  if (as_json) {
    j["ok"] = rep.ok;
    j["failures"] = rep.failures;
    std::cout << j.dump() << "\n";
  } else if (rep.ok) {
    const auto& l = lat.value();
    std::cout << "isomorphism confirmed: " << l.n
              << " elements onto Prop(S_L)\n";
    for (int x = 0; x < l.n; ++x) {
      Mask cone = 0;
      for (int y = 0; y < l.n; ++y)
        if (l.leq(y, x)) cone |= Mask(1) << y;
      std::cout << (x < static_cast<int>(l.names.size()) ? l.names[x]
                                                         : std::to_string(x))
                << " -> " << mask_members(cone, l.n, l.names) << "\n";
    }
  } else {
    for (const auto& fmsg : rep.failures)
      std::cout << "failure: " << fmsg << "\n";
  }
  return rep.ok ? 0 : 1;
}

int cover_classify(const std::string& path, const std::string& text,
                   StructureKind kind, bool as_json, json& j) {
  if (kind == StructureKind::LocaleFile) {
    auto raw = locale_from_json(text);
    if (!raw.ok()) return usage_error(path + ": " + raw.error());
    auto lat = make_lattice(raw.value());
    if (!lat.ok()) {
      if (as_json) {
        j["ok"] = false;
        j["error"] = describe(lat.error());
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "invalid locale: " << describe(lat.error()) << "\n";
      }
      return 1;
    }
    bool distributive = !validate_locale(lat.value()).has_value();
    if (as_json) {
      j["ok"] = true;
      j["kind"] = "locale";
      j["distributive"] = distributive;
      if (lat.value().has_op()) {
        auto opf = classify_operator(lat.value());
        j["operator"] = json{{"monotone", opf.monotone},
                             {"inflationary", opf.inflationary},
                             {"prenucleus", opf.prenucleus},
                             {"multiplicative", opf.multiplicative},
                             {"dense", opf.dense},
                             {"nucleus", opf.nucleus}};
      }
      std::cout << j.dump() << "\n";
    } else {
      std::cout << "kind=locale\n"
                << "distributive=" << (distributive ? "true" : "false") << "\n";
      if (lat.value().has_op()) print_operator_lines(classify_operator(lat.value()));
    }
    return 0;
  }
  auto sys = cover_system_from_json(text);
  if (!sys.ok()) return usage_error(path + ": " + sys.error());
  auto fl = classify_cover_system(sys.value());
  if (as_json) {
    j["ok"] = true;
    j["kind"] = "cover-system";
    j["flags"] = flags_json(fl);
    j["notes"] = fl.notes;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "kind=cover-system\n";
    print_flag_lines(fl);
  }
  return 0;
}

int cover_verify(const std::string& path, const std::string& text,
                 StructureKind kind, bool as_json, json& j) {
  if (kind == StructureKind::LocaleFile) {
    auto raw = locale_from_json(text);
    if (!raw.ok()) return usage_error(path + ": " + raw.error());
    auto lat = make_lattice(raw.value());
    std::string detail;
    bool ok = lat.ok();
    if (ok) {
      auto v = validate_locale(lat.value());
      ok = !v.has_value();
      if (v) detail = describe(*v);
    } else {
      detail = describe(lat.error());
    }
    if (as_json) {
      j["ok"] = ok;
      j["kind"] = "locale";
      if (!ok) j["error"] = detail;
      std::cout << j.dump() << "\n";
    } else {
      std::cout << "locale: " << (ok ? "ok" : detail) << "\n";
    }
    return ok ? 0 : 1;
  }
  if (kind == StructureKind::PredicateModelFile) {
    auto pm = predicate_model_from_json(text);
    if (!pm.ok()) return usage_error(path + ": " + pm.error());
    auto fl = classify_cover_system(pm.value().system);
    auto bad = validate_predicate_model(pm.value());
    bool ok = fl.cover && !bad.has_value();
    if (as_json) {
      j["ok"] = ok;
      j["kind"] = "predicate-model";
      j["flags"] = flags_json(fl);
      if (bad) j["error"] = *bad;
      std::cout << j.dump() << "\n";
    } else {
      std::cout << "system cover axioms: " << (fl.cover ? "ok" : "violated")
                << "\n"
                << "valuation: " << (bad ? *bad : "ok") << "\n";
    }
    return ok ? 0 : 1;
  }
  auto sys = cover_system_from_json(text);
  if (!sys.ok()) return usage_error(path + ": " + sys.error());
  auto fl = classify_cover_system(sys.value());
  if (as_json) {
    j["ok"] = fl.cover;
    j["kind"] = "cover-system";
    j["checks"] = json{{"existence", fl.existence},
                       {"transitivity", fl.transitivity},
                       {"refinement", fl.refinement},
                       {"localic", fl.localic},
                       {"strict", fl.strict}};
    j["notes"] = fl.notes;
    std::cout << j.dump() << "\n";
  } else {
    auto line = [](const char* name, bool v) {
      std::cout << name << ": " << (v ? "ok" : "violated") << "\n";
    };
    line("existence", fl.existence);
    line("transitivity", fl.transitivity);
    line("refinement", fl.refinement);
    if (fl.cover && fl.strict) std::cout << "strict localic: ok\n";
    else if (fl.cover && fl.localic) std::cout << "localic: ok (not strict)\n";
    for (const auto& n : fl.notes) std::cout << "note: " << n << "\n";
  }
  return fl.cover ? 0 : 1;
}

int cmd_cover(const std::string& mode, const std::string& path, bool as_json) {
  auto text = read_file(path);
  if (!text) return usage_error("cannot read '" + path + "'");
  auto kind = structure_kind(*text);
  if (!kind.ok()) return usage_error(path + ": " + kind.error());

  json j{{"command", "cover"}, {"mode", mode}};
  try {
    if (mode == "represent") {
      if (kind.value() != StructureKind::LocaleFile)
        return usage_error("represent needs a locale file");
      return cover_represent(path, *text, as_json, j);
    }
    if (mode == "classify")
      return cover_classify(path, *text, kind.value(), as_json, j);
    if (mode == "verify")
      return cover_verify(path, *text, kind.value(), as_json, j);
  } catch (const guard_limit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return usage_error("cover mode must be verify, classify or represent");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lambda-IEL toolkit: typecheck, normalize, translate, and "
               "explore Kripke and cover-system semantics"};
  app.require_subcommand(1);
  long long fuel = env_fuel();

  std::string term_file, ctx_file;
  bool as_json = false, trace = false, check_typing = false;

  auto* check = app.add_subcommand("check", "infer the type of a term file");
  check->add_option("file", term_file)->required();
  check->add_option("--context", ctx_file, "context file of name : type lines");
  check->add_flag("--json", as_json);

  auto* norm = app.add_subcommand("norm", "normalize a term file");
  norm->add_option("file", term_file)->required();
  norm->add_flag("--trace", trace, "print one line per reduction step");
  norm->add_option("--fuel", fuel, "step budget");
  norm->add_flag("--json", as_json);

  auto* translate =
      app.add_subcommand("translate", "translate into the monadic metalanguage");
  translate->add_option("file", term_file)->required();
  translate->add_option("--context", ctx_file);
  translate->add_flag("--check", check_typing,
                      "verify typing is preserved by the translation");
  translate->add_flag("--json", as_json);

  std::string kmode, formula_text, logic_name = "iel-";
  int max_worlds = 4;
  auto* kripke = app.add_subcommand("kripke", "validity / countermodel search");
  kripke->add_option("mode", kmode, "valid | counter")->required();
  kripke->add_option("formula", formula_text)->required();
  kripke->add_option("--logic", logic_name, "iel- | iel");
  kripke->add_option("--max-worlds", max_worlds);
  kripke->add_flag("--json", as_json);

  std::string cmode, structure_file;
  auto* cover = app.add_subcommand("cover", "cover-system and locale checks");
  cover->add_option("mode", cmode, "verify | classify | represent")->required();
  cover->add_option("file", structure_file)->required();
  cover->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(term_file, ctx_file, as_json);
    if (norm->parsed()) return cmd_norm(term_file, trace, fuel, as_json);
    if (translate->parsed())
      return cmd_translate(term_file, ctx_file, check_typing, as_json);
    if (kripke->parsed())
      return cmd_kripke(kmode, formula_text, logic_name, max_worlds, as_json);
    if (cover->parsed()) return cmd_cover(cmode, structure_file, as_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
