#include <set>
#include <sstream>

#include "mmfuse/composition.hpp"
#include "mmfuse/errors.hpp"
#include "text_util.hpp"

namespace mmfuse {
namespace {

const char* side_code(Side s) {
    switch (s) {
        case Side::textual: return "T";
        case Side::visual: return "V";
        case Side::both: return "both";
    }
    return "?";
}

const char* modality_code(Modality m) { return m == Modality::textual ? "T" : "V"; }

std::size_t parse_positive(std::string_view s, std::size_t line, const char* what) {
    std::size_t v = 0;
    if (!detail::parse_size(s, v) || v == 0) {
        throw ParseError(std::string(what) + " must be a positive integer, got '" + std::string(s) + "'",
                         line);
    }
    return v;
}

Side parse_side(std::string_view s, std::size_t line) {
    if (s == "T") return Side::textual;
    if (s == "V") return Side::visual;
    if (s == "both") return Side::both;
    throw ParseError("side must be T, V or both, got '" + std::string(s) + "'", line);
}

Modality parse_modality(std::string_view s, std::size_t line) {
    if (s == "T") return Modality::textual;
    if (s == "V") return Modality::visual;
    throw ParseError("modality must be T or V, got '" + std::string(s) + "'", line);
}

std::string expect_prefixed(std::string_view s, std::string_view prefix, std::size_t line) {
    if (s.substr(0, prefix.size()) != prefix) {
        throw ParseError("expected '" + std::string(prefix) + "...', got '" + std::string(s) + "'",
                         line);
    }
    return std::string(s.substr(prefix.size()));
}

FusionLayer parse_layer_b(std::string_view value, std::size_t line) {
    auto parts = detail::split(value, ':');
    const auto kind = parts[0];
    if (kind == "none" && parts.size() == 2) return NoFusion{parse_side(parts[1], line)};
    if ((kind == "cca" || kind == "rcca") && parts.size() == 3) {
        const auto dim = parse_positive(parts[1], line, "fusion dimension");
        const auto side = parse_side(parts[2], line);
        if (kind == "cca") return CcaFusion{dim, side};
        return RccaFusion{dim, side};
    }
    if (kind == "cca_plus_rcca" && parts.size() == 4) {
        CcaPlusRcca f;
        f.dim = parse_positive(parts[1], line, "fusion dimension");
        f.cca_side = parse_modality(expect_prefixed(parts[2], "cca=", line), line);
        f.rcca_side = parse_modality(expect_prefixed(parts[3], "rcca=", line), line);
        return f;
    }
    throw ParseError("unrecognized layer_b value '" + std::string(value) + "'", line);
}

CombinationLayer parse_layer_c(std::string_view value, std::size_t line) {
    if (value == "none") return NoCombination{};
    if (value == "concat") return Concat{};
    if (value.substr(0, 3) == "li:") {
        double alpha = 0;
        if (!detail::parse_double(value.substr(3), alpha)) {
            throw ParseError("LI weight is not a number: '" + std::string(value.substr(3)) + "'",
                             line);
        }
        return Interpolate{alpha};
    }
    throw ParseError("unrecognized layer_c value '" + std::string(value) + "'", line);
}

std::string fusion_label(const FusionLayer& fusion) {
    std::ostringstream out;
    if (const auto* f = std::get_if<CcaFusion>(&fusion)) {
        out << "CCA (";
        if (f->side != Side::both) out << side_code(f->side) << ',';
        out << f->dim << ')';
    } else if (const auto* f = std::get_if<RccaFusion>(&fusion)) {
        out << "R-CCA (";
        if (f->side != Side::both) out << side_code(f->side) << ',';
        out << f->dim << ')';
    } else if (const auto* f = std::get_if<CcaPlusRcca>(&fusion)) {
        out << "CCA (" << modality_code(f->cca_side) << ',' << f->dim << ") + R-CCA ("
            << modality_code(f->rcca_side) << ',' << f->dim << ')';
    } else {
        const auto side = std::get<NoFusion>(fusion).side;
        if (side != Side::both) out << side_code(side);
    }
    return out.str();
}

}  // namespace

std::string format_configuration(const Configuration& config) {
    std::ostringstream out;
    out << "layer_a=";
    if (config.pca_dim) {
        out << "pca:" << *config.pca_dim;
    } else {
        out << "none";
    }
    out << "\nlayer_b=";
    if (const auto* f = std::get_if<NoFusion>(&config.fusion)) {
        out << "none:" << side_code(f->side);
    } else if (const auto* f = std::get_if<CcaFusion>(&config.fusion)) {
        out << "cca:" << f->dim << ':' << side_code(f->side);
    } else if (const auto* f = std::get_if<RccaFusion>(&config.fusion)) {
        out << "rcca:" << f->dim << ':' << side_code(f->side);
    } else {
        const auto& m = std::get<CcaPlusRcca>(config.fusion);
        out << "cca_plus_rcca:" << m.dim << ":cca=" << modality_code(m.cca_side)
            << ":rcca=" << modality_code(m.rcca_side);
    }
    out << "\nlayer_c=";
    if (std::holds_alternative<NoCombination>(config.combination)) {
        out << "none";
    } else if (std::holds_alternative<Concat>(config.combination)) {
        out << "concat";
    } else {
        out << "li:" << detail::format_double(std::get<Interpolate>(config.combination).alpha);
    }
    out << "\nridge=" << detail::format_double(config.ridge) << '\n';
    if (config.normalize_concat) out << "concat_norm=l2\n";
    return out.str();
}

std::string format_configuration_inline(const Configuration& config) {
    std::string s = format_configuration(config);
    s.pop_back();
    for (auto& c : s) {
        if (c == '\n') c = ' ';
    }
    return s;
}

Configuration parse_configuration(std::string_view text) {
    Configuration config;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    for (auto raw : detail::split(text, '\n')) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        for (auto token : detail::split_whitespace(raw)) {
            const auto eq = token.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError("expected key=value, got '" + std::string(token) + "'", line_no);
            }
            const auto key = token.substr(0, eq);
            const auto value = token.substr(eq + 1);
            if (!seen.emplace(key).second) {
                throw ParseError("duplicate key '" + std::string(key) + "'", line_no);
            }
            if (key == "layer_a") {
                if (value == "none") {
                    config.pca_dim.reset();
                } else {
                    config.pca_dim = parse_positive(expect_prefixed(value, "pca:", line_no), line_no,
                                                    "PCA dimension");
                }
            } else if (key == "layer_b") {
                config.fusion = parse_layer_b(value, line_no);
            } else if (key == "layer_c") {
                config.combination = parse_layer_c(value, line_no);
            } else if (key == "ridge") {
                if (!detail::parse_double(value, config.ridge)) {
                    throw ParseError("ridge is not a number: '" + std::string(value) + "'", line_no);
                }
            } else if (key == "concat_norm") {
                if (value != "l2" && value != "none") {
                    throw ParseError("concat_norm must be l2 or none", line_no);
                }
                config.normalize_concat = value == "l2";
            } else {
                throw ParseError("unknown key '" + std::string(key) + "'", line_no);
            }
        }
    }
    if (!seen.contains("layer_b")) throw ParseError("configuration lacks layer_b");
    return config;
}

std::string describe_configuration(const Configuration& config) {
    std::vector<std::string> parts;
    if (config.pca_dim) parts.push_back("PCA (" + std::to_string(*config.pca_dim) + ")");
    if (auto f = fusion_label(config.fusion); !f.empty()) parts.push_back(std::move(f));
    if (std::holds_alternative<Concat>(config.combination)) {
        parts.emplace_back(config.normalize_concat ? "Concat (l2)" : "Concat");
    } else if (const auto* li = std::get_if<Interpolate>(&config.combination)) {
        parts.push_back("LI (" + detail::format_double(li->alpha) + ")");
    }
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " / ";
        out += parts[i];
    }
    return out;
}

MotifSet parse_motifs(std::string_view text) {
    MotifSet set;
    for (auto raw : detail::split(text, ',')) {
        const auto name = detail::trim(raw);
        if (name == "pca") {
            set.insert(Motif::pca);
        } else if (name == "cca") {
            set.insert(Motif::cca);
        } else if (name == "rcca") {
            set.insert(Motif::rcca);
        } else if (name == "concat") {
            set.insert(Motif::concat);
        } else if (name == "li") {
            set.insert(Motif::li);
        } else {
            throw ParseError("unknown motif '" + std::string(name) +
                             "' (expected pca, cca, rcca, concat, li)");
        }
    }
    return set;
}

std::string format_motifs(const MotifSet& motifs) {
    std::string out;
    const std::pair<Motif, const char*> names[] = {{Motif::pca, "pca"},
                                                   {Motif::cca, "cca"},
                                                   {Motif::rcca, "rcca"},
                                                   {Motif::concat, "concat"},
                                                   {Motif::li, "li"}};
    for (const auto& [m, name] : names) {
        if (!motifs.contains(m)) continue;
        if (!out.empty()) out += ',';
        out += name;
    }
    return out;
}

}  // namespace mmfuse
