#include "dendrite/netlist.hpp"

#include "dendrite/si.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace dendrite::netlist {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct Token {
    std::string text;
    int column = 0; // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#')
            ++i;
        tokens.push_back(Token{std::string(line.substr(start, i - start)),
                               static_cast<int>(start) + 1});
    }
    return tokens;
}

// Pending gate reference, resolved once the whole document is read.
struct PendingGate {
    std::size_t segment = 0;
    std::string source;
    int line = 0;
    int column = 0;
};

class Parser {
public:
    ParseResult run(std::string_view source) {
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= source.size()) {
            const std::size_t nl = source.find('\n', pos);
            std::string_view line = source.substr(pos, nl == std::string_view::npos
                                                           ? std::string_view::npos
                                                           : nl - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            ++line_no;
            parse_line(line, line_no);
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        resolve_references();
        return std::move(result_);
    }

private:
    ParseResult result_;
    std::vector<PendingGate> pending_gates_;
    std::map<std::string, std::pair<int, int>> name_positions_;

    void error(int line, int column, std::string message, std::string token = {}) {
        result_.errors.push_back(ParseError{line, column, std::move(message), std::move(token)});
    }

    bool take_value(const Token& t, int line, const std::string& key, double& out) {
        const auto v = si::parse_value(t.text);
        if (!v) {
            error(line, t.column, "bad number for '" + key + "'", t.text);
            return false;
        }
        out = *v;
        return true;
    }

    // key=value tokens in any order; returns false and reports if a token's
    // key is not in `keys` or a required key is missing.
    struct KeyValue {
        std::string key;
        std::string value;
        int column = 0;
    };

    std::vector<KeyValue> split_pairs(const std::vector<Token>& tokens, std::size_t from,
                                      int line) {
        std::vector<KeyValue> out;
        for (std::size_t i = from; i < tokens.size(); ++i) {
            const auto& t = tokens[i];
            const auto eq = t.text.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 >= t.text.size()) {
                error(line, t.column, "expected key=value", t.text);
                continue;
            }
            out.push_back(KeyValue{lower(t.text.substr(0, eq)), t.text.substr(eq + 1),
                                   t.column + static_cast<int>(eq) + 1});
        }
        return out;
    }

    bool declare_name(const std::string& name, int line, int column) {
        auto word = [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                   (c >= '0' && c <= '9') || c == '_' || c == '-';
        };
        if (name.empty() || !std::all_of(name.begin(), name.end(), word)) {
            error(line, column, "invalid name '" + name + "'", name);
            return false;
        }
        if (name_positions_.count(name)) {
            error(line, column, "duplicate name '" + name + "'", name);
            return false;
        }
        name_positions_[name] = {line, column};
        return true;
    }

    void parse_line(std::string_view line, int line_no) {
        const auto tokens = tokenize(line);
        if (tokens.empty()) return;
        const std::string keyword = lower(tokens[0].text);
        if (keyword == "vdd") {
            if (tokens.size() != 2) {
                error(line_no, tokens[0].column, "vdd expects one value");
                return;
            }
            double v = 0;
            if (take_value(tokens[1], line_no, "vdd", v)) result_.network.vdd = v;
        } else if (keyword == "stim") {
            parse_stim(tokens, line_no);
        } else if (keyword == "seg") {
            parse_seg(tokens, line_no);
        } else if (keyword == "probe") {
            if (tokens.size() != 2) {
                error(line_no, tokens[0].column, "probe expects one channel name");
                return;
            }
            probes_pending_.push_back({tokens[1].text, line_no, tokens[1].column});
        } else {
            error(line_no, tokens[0].column, "unknown keyword '" + keyword + "'", tokens[0].text);
        }
    }

    void parse_stim(const std::vector<Token>& tokens, int line) {
        if (tokens.size() < 3) {
            error(line, tokens[0].column, "stim expects: stim <name> <pulse|train|spike> ...");
            return;
        }
        const std::string name = tokens[1].text;
        const std::string kind = lower(tokens[2].text);
        if (!declare_name(name, line, tokens[1].column)) return;
        const auto pairs = split_pairs(tokens, 3, line);
        auto get = [&](const std::string& key, double& out, bool required) {
            for (const auto& kv : pairs) {
                if (kv.key != key) continue;
                const auto v = si::parse_value(kv.value);
                if (!v) {
                    error(line, kv.column, "bad number for '" + key + "'", kv.value);
                    return false;
                }
                out = *v;
                return true;
            }
            if (required) error(line, tokens[2].column, "stim " + kind + " missing '" + key + "='");
            return !required;
        };
        auto known_keys = [&](std::initializer_list<const char*> keys) {
            for (const auto& kv : pairs) {
                if (std::none_of(keys.begin(), keys.end(),
                                 [&](const char* k) { return kv.key == k; }))
                    error(line, kv.column, "unknown key '" + kv.key + "' for stim " + kind,
                          kv.key);
            }
        };
        if (kind == "pulse") {
            known_keys({"amp", "width", "t0"});
            SquarePulse p;
            if (!get("amp", p.amplitude, true)) return;
            if (!get("width", p.width, true)) return;
            if (!get("t0", p.t_start, false)) return;
            add_stimulus(name, p, line, tokens[1].column);
        } else if (kind == "train") {
            known_keys({"amp", "width", "period", "count", "t0"});
            PulseTrain p;
            double count = 0;
            if (!get("amp", p.amplitude, true)) return;
            if (!get("width", p.width, true)) return;
            if (!get("period", p.period, true)) return;
            if (!get("count", count, true)) return;
            if (!get("t0", p.t_start, false)) return;
            p.count = static_cast<int>(count);
            add_stimulus(name, p, line, tokens[1].column);
        } else if (kind == "spike") {
            known_keys({"v0", "ra", "rl", "cr", "cm", "t0"});
            AnalyticSpike p;
            if (!get("v0", p.v0, true)) return;
            if (!get("ra", p.params.r_axial, true)) return;
            if (!get("rl", p.params.r_leak, true)) return;
            if (!get("cr", p.params.c_reservoir, true)) return;
            if (!get("cm", p.params.c_membrane, true)) return;
            if (!get("t0", p.t_start, false)) return;
            p.params.polarity = Polarity::PType; // deviation frame of the S1 analysis
            add_stimulus(name, p, line, tokens[1].column);
        } else {
            error(line, tokens[2].column, "unknown stimulus kind '" + kind + "'", tokens[2].text);
        }
    }

    void add_stimulus(const std::string& name, Stimulus s, int line, int column) {
        try {
            validate(s);
        } catch (const std::invalid_argument& e) {
            error(line, column, e.what(), name);
            return;
        }
        result_.stimuli.emplace(name, std::move(s));
    }

    void parse_seg(const std::vector<Token>& tokens, int line) {
        if (tokens.size() < 4) {
            error(line, tokens[0].column, "seg expects: seg <name> <n|p> key=value...");
            return;
        }
        const std::string name = tokens[1].text;
        const std::string pol = lower(tokens[2].text);
        if (pol != "n" && pol != "p") {
            error(line, tokens[2].column, "segment polarity must be 'n' or 'p'", tokens[2].text);
            return;
        }
        if (!declare_name(name, line, tokens[1].column)) return;

        SegmentInstance seg;
        seg.name = name;
        seg.params.polarity = pol == "n" ? Polarity::NType : Polarity::PType;
        TransistorModel model = default_transistor(seg.params.polarity);

        std::vector<std::string> gate_tokens;
        int gate_column = tokens[0].column;
        bool ok = true;

        auto apply_model_key = [&](TransistorModel& m, const std::string& key,
                                   const std::string& value, int column) {
            auto number = [&](double& out) {
                const auto v = si::parse_value(value);
                if (!v) {
                    error(line, column, "bad number for '" + key + "'", value);
                    ok = false;
                    return;
                }
                out = *v;
            };
            if (key == "vth") number(m.v_threshold);
            else if (key == "ron") number(m.r_on);
            else if (key == "roff") number(m.r_off);
            else if (key == "vtw") number(m.transition_width);
            else if (key == "model") {
                const std::string v = lower(value);
                if (v == "hard") m.kind = SwitchKind::HardSwitch;
                else if (v == "smooth") m.kind = SwitchKind::Smoothed;
                else {
                    error(line, column, "model must be 'hard' or 'smooth'", value);
                    ok = false;
                }
            } else {
                return false;
            }
            return true;
        };

        for (const auto& kv : split_pairs(tokens, 3, line)) {
            auto number = [&](double& out) {
                const auto v = si::parse_value(kv.value);
                if (!v) {
                    error(line, kv.column, "bad number for '" + kv.key + "'", kv.value);
                    ok = false;
                    return;
                }
                out = *v;
            };
            if (kv.key == "ra") number(seg.params.r_axial);
            else if (kv.key == "rl") number(seg.params.r_leak);
            else if (kv.key == "cr") number(seg.params.c_reservoir);
            else if (kv.key == "cm") number(seg.params.c_membrane);
            else if (kv.key == "gate") {
                gate_column = kv.column;
                std::stringstream ss(kv.value);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) gate_tokens.push_back(item);
            } else if (!apply_model_key(model, kv.key, kv.value, kv.column)) {
                error(line, kv.column, "unknown key '" + kv.key + "' for seg", kv.key);
                ok = false;
            }
        }
        if (gate_tokens.empty()) {
            error(line, tokens[0].column, "seg '" + name + "' needs at least one gate source");
            ok = false;
        }

        // A gate source may carry per-gate model overrides as @key=value
        // suffixes: gate=n1,n2@vth=1.4
        struct GateSpec {
            std::string source;
            TransistorModel model;
        };
        std::vector<GateSpec> gates;
        for (const auto& token : gate_tokens) {
            GateSpec entry;
            entry.model = model;
            std::stringstream ss(token);
            std::string part;
            bool first = true;
            while (std::getline(ss, part, '@')) {
                if (first) {
                    entry.source = part;
                    first = false;
                    continue;
                }
                const auto eq = part.find('=');
                if (eq == std::string::npos || eq == 0 || eq + 1 >= part.size()) {
                    error(line, gate_column, "expected @key=value in gate source", part);
                    ok = false;
                    continue;
                }
                if (!apply_model_key(entry.model, lower(part.substr(0, eq)), part.substr(eq + 1),
                                     gate_column)) {
                    error(line, gate_column, "unknown gate override '" + part + "'", part);
                    ok = false;
                }
            }
            if (entry.source.empty()) {
                error(line, gate_column, "empty gate source", token);
                ok = false;
                continue;
            }
            gates.push_back(std::move(entry));
        }

        try {
            validate(seg.params);
            for (const auto& g : gates) validate(g.model);
        } catch (const std::invalid_argument& e) {
            error(line, tokens[1].column, e.what(), name);
            ok = false;
        }
        if (!ok) return;

        const std::size_t index = result_.network.segments.size();
        for (const auto& g : gates) {
            seg.gates.push_back(GateInput{g.model, StimulusRef{g.source}}); // placeholder source
            pending_gates_.push_back(PendingGate{index, g.source, line, gate_column});
        }
        result_.network.segments.push_back(std::move(seg));
    }

    struct PendingProbe {
        std::string name;
        int line;
        int column;
    };
    std::vector<PendingProbe> probes_pending_;

    void resolve_references() {
        std::set<std::string> stim_names;
        for (const auto& [n, s] : result_.stimuli) stim_names.insert(n);
        std::set<std::string> seg_names;
        for (const auto& s : result_.network.segments) seg_names.insert(s.name);

        std::size_t gate_cursor = 0;
        for (std::size_t si_ = 0; si_ < result_.network.segments.size(); ++si_) {
            auto& seg = result_.network.segments[si_];
            for (auto& gate : seg.gates) {
                const auto& pending = pending_gates_[gate_cursor++];
                if (stim_names.count(pending.source)) {
                    gate.source = StimulusRef{pending.source};
                } else if (seg_names.count(pending.source)) {
                    gate.source = MembraneNodeRef{pending.source};
                } else {
                    error(pending.line, pending.column,
                          "unresolved gate reference '" + pending.source + "'", pending.source);
                }
            }
        }

        for (const auto& p : probes_pending_) {
            std::string channel = p.name;
            if (seg_names.count(channel)) channel = membrane_channel(channel);
            const bool known =
                stim_names.count(channel) ||
                std::any_of(result_.network.segments.begin(), result_.network.segments.end(),
                            [&](const SegmentInstance& s) {
                                return channel == membrane_channel(s.name) ||
                                       channel == reservoir_channel(s.name);
                            });
            if (!known) {
                error(p.line, p.column, "unresolved probe '" + p.name + "'", p.name);
                continue;
            }
            if (std::find(result_.probes.begin(), result_.probes.end(), channel) ==
                result_.probes.end())
                result_.probes.push_back(channel);
        }
    }
};

std::string polarity_letter(Polarity p) { return p == Polarity::NType ? "n" : "p"; }

} // namespace

ParseResult parse(std::string_view source) { return Parser{}.run(source); }

std::string serialize(const Network& net, const std::map<std::string, Stimulus>& stimuli,
                      const std::vector<std::string>& probes) {
    std::ostringstream out;
    out << "vdd " << si::format_value(net.vdd) << '\n';
    for (const auto& [name, s] : stimuli) {
        out << "stim " << name << ' ';
        if (const auto* p = std::get_if<SquarePulse>(&s)) {
            out << "pulse amp=" << si::format_value(p->amplitude)
                << " width=" << si::format_value(p->width)
                << " t0=" << si::format_value(p->t_start);
        } else if (const auto* t = std::get_if<PulseTrain>(&s)) {
            out << "train amp=" << si::format_value(t->amplitude)
                << " width=" << si::format_value(t->width)
                << " period=" << si::format_value(t->period) << " count=" << t->count
                << " t0=" << si::format_value(t->t_start);
        } else if (const auto* a = std::get_if<AnalyticSpike>(&s)) {
            out << "spike v0=" << si::format_value(a->v0)
                << " ra=" << si::format_value(a->params.r_axial)
                << " rl=" << si::format_value(a->params.r_leak)
                << " cr=" << si::format_value(a->params.c_reservoir)
                << " cm=" << si::format_value(a->params.c_membrane)
                << " t0=" << si::format_value(a->t_start);
        } else {
            throw std::invalid_argument("serialize: samples stimulus '" + name +
                                        "' is not representable in the netlist grammar");
        }
        out << '\n';
    }
    for (const auto& seg : net.segments) {
        if (seg.gates.empty())
            throw std::invalid_argument("serialize: segment '" + seg.name + "' has no gates");
        // The first gate's model is written at segment level; other gates
        // carry @key=value overrides for any differing fields.
        const TransistorModel& model = seg.gates.front().model;
        out << "seg " << seg.name << ' ' << polarity_letter(seg.params.polarity)
            << " ra=" << si::format_value(seg.params.r_axial)
            << " rl=" << si::format_value(seg.params.r_leak)
            << " cr=" << si::format_value(seg.params.c_reservoir)
            << " cm=" << si::format_value(seg.params.c_membrane) << " gate=";
        for (std::size_t i = 0; i < seg.gates.size(); ++i) {
            if (i) out << ',';
            if (const auto* sr = std::get_if<StimulusRef>(&seg.gates[i].source)) out << sr->name;
            else out << std::get<MembraneNodeRef>(seg.gates[i].source).segment;
            const TransistorModel& g = seg.gates[i].model;
            if (g.v_threshold != model.v_threshold)
                out << "@vth=" << si::format_value(g.v_threshold);
            if (g.r_on != model.r_on) out << "@ron=" << si::format_value(g.r_on);
            if (g.r_off != model.r_off) out << "@roff=" << si::format_value(g.r_off);
            if (g.kind != model.kind)
                out << "@model=" << (g.kind == SwitchKind::HardSwitch ? "hard" : "smooth");
            if (g.transition_width != model.transition_width)
                out << "@vtw=" << si::format_value(g.transition_width);
        }
        const TransistorModel defaults = default_transistor(seg.params.polarity);
        if (model.v_threshold != defaults.v_threshold)
            out << " vth=" << si::format_value(model.v_threshold);
        if (model.r_on != defaults.r_on) out << " ron=" << si::format_value(model.r_on);
        if (model.r_off != defaults.r_off) out << " roff=" << si::format_value(model.r_off);
        if (model.kind != defaults.kind)
            out << " model=" << (model.kind == SwitchKind::HardSwitch ? "hard" : "smooth");
        if (model.transition_width != defaults.transition_width)
            out << " vtw=" << si::format_value(model.transition_width);
        out << '\n';
    }
    for (const auto& p : probes) out << "probe " << p << '\n';
    return out.str();
}

} // namespace dendrite::netlist
