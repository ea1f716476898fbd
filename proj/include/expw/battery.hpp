#pragma once

// Fixed test-function battery with analytic derivatives through third order.
// The set is versioned with the repository so report diffs stay meaningful.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace expw {

struct TestFn {
    std::string name;
    std::function<double(double)> f, d1, d2, d3;
};

inline const std::vector<TestFn>& battery() {
    static const std::vector<TestFn> fns = {
        {"sin",
         [](double x) { return std::sin(x); },
         [](double x) { return std::cos(x); },
         [](double x) { return -std::sin(x); },
         [](double x) { return -std::cos(x); }},
        {"arctan",
         [](double x) { return std::atan(x); },
         [](double x) { return 1.0 / (1.0 + x * x); },
         [](double x) { double d = 1.0 + x * x; return -2.0 * x / (d * d); },
         [](double x) { double d = 1.0 + x * x; return (6.0 * x * x - 2.0) / (d * d * d); }},
        {"xgauss",  // x exp(-x^2/2)
         [](double x) { return x * std::exp(-0.5 * x * x); },
         [](double x) { return (1.0 - x * x) * std::exp(-0.5 * x * x); },
         [](double x) { return (x * x * x - 3.0 * x) * std::exp(-0.5 * x * x); },
         [](double x) { return (-x * x * x * x + 6.0 * x * x - 3.0) * std::exp(-0.5 * x * x); }},
        {"gauss",  // exp(-x^2/2)
         [](double x) { return std::exp(-0.5 * x * x); },
         [](double x) { return -x * std::exp(-0.5 * x * x); },
         [](double x) { return (x * x - 1.0) * std::exp(-0.5 * x * x); },
         [](double x) { return (3.0 * x - x * x * x) * std::exp(-0.5 * x * x); }},
        {"abs3",  // smoothed |x|^3: (x^2 + 1/4)^{3/2}
         [](double x) { return std::pow(x * x + 0.25, 1.5); },
         [](double x) { return 3.0 * x * std::sqrt(x * x + 0.25); },
         [](double x) { return (6.0 * x * x + 0.75) / std::sqrt(x * x + 0.25); },
         [](double x) { return x * (6.0 * x * x + 2.25) / std::pow(x * x + 0.25, 1.5); }},
    };
    return fns;
}

inline const TestFn& battery_fn(const std::string& name) {
    for (const auto& t : battery())
        if (t.name == name) return t;
    throw std::invalid_argument("unknown test function: " + name);
}

}  // namespace expw
