#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "crn/network.hpp"
#include "oracles.hpp"

namespace fixture {

// X1 + 2 X2 <=> X3, X3 <=> X2 + 2 X4.
inline crn::ReactionNetwork two_reaction(double kf1 = 1.0, double kr1 = 1.0, double kf2 = 1.0, double kr2 = 1.0) {
    return crn::build_network({"X1", "X2", "X3", "X4"}, {{{1, 2, 0, 0}, {0, 0, 1, 0}, kf1, kr1, "R1"},
                                                         {{0, 0, 1, 0}, {0, 1, 0, 2}, kf2, kr2, "R2"}});
}

// X1 + 2 X2 <=> X3, X2 + X3 <=> 2 X4.
inline crn::ReactionNetwork two_reaction_alt(double kf1 = 1.0, double kr1 = 1.0, double kf2 = 1.0,
                                             double kr2 = 1.0) {
    return crn::build_network({"X1", "X2", "X3", "X4"}, {{{1, 2, 0, 0}, {0, 0, 1, 0}, kf1, kr1, "R1"},
                                                         {{0, 1, 1, 0}, {0, 0, 0, 2}, kf2, kr2, "R2"}});
}

inline crn::ReactionNetwork pair_network(double kf, double kr) {
    return crn::build_network({"X1", "X2"}, {{{1, 0}, {0, 1}, kf, kr, "R1"}});
}

inline crn::Vector vec(std::initializer_list<double> values) {
    crn::Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

inline crn::Vector from_std(const oracle::Vec& v) {
    return Eigen::Map<const crn::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline oracle::Vec to_std(const crn::Vector& v) { return oracle::Vec(v.data(), v.data() + v.size()); }

}  // namespace fixture
