#include "mixtopo/model_file.hpp"

#include <set>

#include "mixtopo/error.hpp"
#include "mixtopo/keyvalue.hpp"

namespace mixtopo {

namespace {

int parse_component(const std::string& s, int line) {
    if (s == "d1" || s == "1" || s == "x") return 0;
    if (s == "d2" || s == "2" || s == "y") return 1;
    if (s == "d3" || s == "3" || s == "z") return 2;
    throw ParseError("term: unknown component '" + s + "' (expected d1, d2 or d3)", line);
}

TermKind parse_kind(const std::string& s, int line) {
    if (s == "cos") return TermKind::cos;
    if (s == "sin") return TermKind::sin;
    throw ParseError("term: unknown kind '" + s + "' (expected cos or sin)", line);
}

BlochModel from_doc(const KeyValueDoc& doc) {
    static const std::set<std::string> known{"builtin", "name", "term", "a1", "a2", "m"};
    for (const auto& e : doc.entries())
        if (!known.count(e.key)) throw ParseError("unknown key '" + e.key + "'", e.line);

    const auto* builtin = doc.find("builtin");
    const auto terms = doc.all("term");

    if (builtin) {
        if (!terms.empty()) throw ParseError("`term` rows cannot be combined with `builtin`", terms.front()->line);
        if (builtin->value != "aniso-qah")
            throw ParseError("unknown builtin model '" + builtin->value + "'", builtin->line);
        AnisoQahParams p;
        if (const auto* e = doc.find("a1")) p.a1 = parse_double(e->value, e->line, "a1");
        if (const auto* e = doc.find("a2")) p.a2 = parse_double(e->value, e->line, "a2");
        if (const auto* e = doc.find("m")) p.m = parse_double(e->value, e->line, "m");
        return BlochModel::aniso_qah(p);
    }

    for (const char* k : {"a1", "a2", "m"})
        if (const auto* e = doc.find(k)) throw ParseError(std::string(k) + " is only valid with `builtin`", e->line);
    if (terms.empty()) throw ParseError("model needs either `builtin` or at least one `term` row", 0);

    DVector d;
    for (const auto* t : terms) {
        const auto f = split_list(t->value);
        if (f.size() != 5) throw ParseError("term: expected 5 fields (component, kind, n_x, n_y, amplitude)", t->line);
        FourierTerm ft;
        const int comp = parse_component(f[0], t->line);
        ft.kind = parse_kind(f[1], t->line);
        ft.nx = static_cast<int>(parse_long(f[2], t->line, "term n_x"));
        ft.ny = static_cast<int>(parse_long(f[3], t->line, "term n_y"));
        ft.amplitude = parse_double(f[4], t->line, "term amplitude");
        d.add_term(comp, ft);
    }
    const auto* name = doc.find("name");
    return BlochModel::two_band(std::move(d), name ? name->value : "fourier");
}

}  // namespace

BlochModel parse_model(std::string_view text) { return from_doc(KeyValueDoc::parse(text)); }

BlochModel load_model_file(const std::string& path) { return from_doc(KeyValueDoc::load(path)); }

BlochModel resolve_model(const std::string& spec) {
    if (spec == "builtin" || spec == "aniso-qah" || spec == "builtin:aniso-qah") return BlochModel::aniso_qah();
    return load_model_file(spec);
}

}  // namespace mixtopo
