#pragma once

#include "dendrite/core.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

// Line-oriented netlist format for dendrite networks.  Keywords are
// case-insensitive, '#' starts a comment, values accept the SI suffixes
// p, n, u, m, k, meg.
//
//   vdd <volts>
//   stim <name> pulse amp=<V> width=<s> t0=<s>
//   stim <name> train amp=<V> width=<s> period=<s> count=<n> t0=<s>
//   stim <name> spike v0=<V> ra=<ohm> rl=<ohm> cr=<F> cm=<F> t0=<s>
//   seg <name> <n|p> ra=<ohm> rl=<ohm> cr=<F> cm=<F> gate=<src>[,<src>...]
//       [vth=<V> ron=<ohm> roff=<ohm> model=<hard|smooth> vtw=<V>]
//   probe <channel>
//
// Gate sources name a stimulus or another segment (its membrane node);
// forward references are allowed.  A source may carry per-gate transistor
// overrides as @key=value suffixes (gate=n1,n2@vth=1.4), since gates on
// one segment need not share a device model.  A probe names a trace
// channel; a bare segment name expands to its membrane channel
// "<name>.vm".

namespace dendrite::netlist {

struct ParseError {
    int line = 0;   // 1-based
    int column = 0; // 1-based
    std::string message;
    std::string token;
};

struct ParseResult {
    Network network;
    std::map<std::string, Stimulus> stimuli;
    std::vector<std::string> probes;
    std::vector<ParseError> errors;

    bool ok() const { return errors.empty(); }
};

/// Never throws: any input yields a result or positioned errors (unresolved
/// references are reported after the full document has been read).
ParseResult parse(std::string_view source);

/// Inverse of parse for representable documents: parse(serialize(x))
/// is structurally equal to x.  Throws std::invalid_argument for networks
/// that the grammar cannot express (Samples stimuli, segments whose gates
/// use differing transistor models).
std::string serialize(const Network& net, const std::map<std::string, Stimulus>& stimuli,
                      const std::vector<std::string>& probes);

} // namespace dendrite::netlist
