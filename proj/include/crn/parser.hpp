#pragma once

// Line-oriented text format for reaction networks (.crn):
//
//   # comment
//   species: X1, X2, X3        (optional; switches to strict mode)
//   r1: X1 + 2 X2 <=> X3 ; kf=1, kr=0.5
//   X2 + X3 <=> 2 X4 ; kf=1, kr=1
//   init X1 = 1.0
//
// Without a species line, species are ordered by first appearance.
// Reactions without an id are named R<k> after their 1-based position.
// "species" and "init" are reserved words.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crn/network.hpp"

namespace crn {

enum class ParseErrorKind {
    Syntax,
    NegativeCoefficient,
    UnknownSpecies,
    MissingRate,
    InvalidReaction,
    Duplicate,
    IncompleteInit,
};

const char* to_string(ParseErrorKind kind);

// Positioned error; line and column are 1-based.
class ParseError : public InvalidInput {
public:
    ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& message);

    ParseErrorKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    ParseErrorKind kind_;
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;
};

struct ReactionEntry {
    std::string id;
    std::vector<int> alpha;  // indexed like NetworkFile::species
    std::vector<int> beta;
    std::optional<double> k_plus;
    std::optional<double> k_minus;
    SourcePos pos;
};

struct InitEntry {
    std::string species;
    double value = 0.0;
    SourcePos pos;
};

struct NetworkFile {
    std::vector<std::string> species;
    bool strict_species = false;
    std::vector<ReactionEntry> reactions;
    std::vector<InitEntry> init;
};

NetworkFile parse(std::string_view text);

struct DefaultRates {
    double k_plus = 1.0;
    double k_minus = 1.0;
};

struct LoadedNetwork {
    ReactionNetwork network;
    std::optional<Vector> c0;
};

// Builds the network (validation by build_network). c0 is present iff the
// file has init lines, in which case every species needs one.
LoadedNetwork to_network(const NetworkFile& file, std::optional<DefaultRates> defaults = std::nullopt);

// Canonical text: species line in network order, one reaction per line with
// explicit coefficients, shortest round-trip numbers, then init lines.
std::string serialize(const ReactionNetwork& network, const std::optional<Vector>& c0 = std::nullopt);

LoadedNetwork load_network_file(const std::string& path, std::optional<DefaultRates> defaults = std::nullopt);

// Shortest decimal text that reads back to the same double.
std::string format_shortest(double value);

}  // namespace crn
