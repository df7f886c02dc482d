#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twistcal/twisted.hpp"

namespace twistcal {

enum class Expectation { pass, fail };

struct Scenario {
  std::string name;
  TwistSpec spec;
  Vec lower;
  Vec upper;
  int resolution = 5;
  std::vector<Vec> fibre_samples;
  Expectation expected = Expectation::pass;
  double tolerance = 1e-6;
  std::string provenance;
};

// Fibre points {-1, 0, 1}^dim, optionally followed by `extra_random` points drawn uniformly from
// [-1, 1]^dim with a 64-bit Mersenne Twister seeded by `seed`.
std::vector<Vec> default_fibre_samples(int dim, int extra_random = 0, std::uint64_t seed = 0);

const std::vector<std::string>& scenario_names();
// Throws ConfigError listing the registry for an unknown name.
Scenario get_scenario(const std::string& name);

// Graph of e^z over the (x, y) plane, and its mirror image under x^4 -> -x^4.
Immersion exp_graph();
Immersion exp_graph_mirror();

// The explicit associative example t omega^1 + alpha omega^2 + beta omega^3 over the e^z graph,
// with alpha = C/(1+e^{2x}) and beta = K(1+e^{2x}), assembled from the closed-form omega frames
// of a holomorphic graph.
Vec exp_example_coords(double x, double y, double t, double c, double k);
// The same example as printed in closed form by the source, transcribed verbatim.
Vec exp_display_coords(double x, double y, double t, double c, double k);

}  // namespace twistcal
