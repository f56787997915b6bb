#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gprlab/nn/tensor.hpp"

namespace gprlab::testing {

/// (operation, output shape) rows of the reference architecture tables for
/// the 256 x 256 models.
using TableRows = std::vector<std::pair<std::string, std::string>>;

inline const TableRows kGeneratorTable = {
    {"Input $N(0, 1)$", "(n, 100)"},
    {"Label", "(n, 1)"},
    {"Embedding", "(n, 1, 100)"},
    {"Flatten", "(n, 100)"},
    {"Multiply", "(n, 100)"},
    {"Dense(8*8*128)", "(n, 8192)"},
    {"Reshape(8, 8, 128)", "(n, 8, 8, 128)"},
    {"BatchNormalization(momentum=0.8)", "(n, 8, 8, 128)"},
    {"ConvTranspose2D(filters=128, kernel-size=5)", "(n, 16, 16, 128)"},
    {"Conv2D(filters=256, kernel-size=5, strides=1)", "(n, 16, 16, 256)"},
    {"ReLU", "(n, 16, 16, 256)"},
    {"BatchNormalization(momentum=0.8)", "(n, 16, 16, 256)"},
    {"ConvTranspose2D(filters=256, kernel-size=5)", "(n, 32, 32, 256)"},
    {"Conv2D(filters=128, kernel-size=5, strides=1)", "(n, 32, 32, 128)"},
    {"ReLU", "(n, 32, 32, 128)"},
    {"BatchNormalization(momentum=0.8)", "(n, 32, 32, 128)"},
    {"ConvTranspose2D(filters=128, kernel-size=5)", "(n, 64, 64, 128)"},
    {"Conv2D(filters=64, kernel-size=5, strides=1)", "(n, 64, 64, 64)"},
    {"ReLU", "(n, 64, 64, 64)"},
    {"BatchNormalization(momentum=0.8)", "(n, 64, 64, 64)"},
    {"ConvTranspose2D(filters=64, kernel-size=5)", "(n, 128, 128, 64)"},
    {"Conv2D(filters=32, kernel-size=5, strides=1)", "(n, 128, 128, 32)"},
    {"ReLU", "(n, 128, 128, 32)"},
    {"BatchNormalization(momentum=0.8)", "(n, 128, 128, 32)"},
    {"ConvTranspose2D(filters=32, kernel-size=5)", "(n, 256, 256, 32)"},
    {"Conv2D(filters=16, kernel-size=5, strides=1)", "(n, 256, 256, 16)"},
    {"ReLU", "(n, 256, 256, 16)"},
    {"BatchNormalization(momentum=0.8)", "(n, 256, 256, 16)"},
    {"Conv2D(filters=1, kernel-size=5, strides=1)", "(n, 256, 256, 1)"},
    {"Tanh", "(n, 256, 256, 1)"},
};

inline const TableRows kCriticTable = {
    {"Input", "(n, 256, 256, 1)"},
    {"Conv2D(filters=16, kernel-size=5, strides=2)", "(n, 128, 128, 16)"},
    {"LeakyReLU(alpha=0.3)", "(n, 128, 128, 16)"},
    {"Conv2D(filters=32, kernel-size=5, strides=2)", "(n, 64, 64, 32)"},
    {"LeakyReLU(alpha=0.3)", "(n, 64, 64, 32)"},
    {"Conv2D(filters=64, kernel-size=5, strides=2)", "(n, 32, 32, 64)"},
    {"LeakyReLU(alpha=0.3)", "(n, 32, 32, 64)"},
    {"Conv2D(filters=128, kernel-size=5, strides=2)", "(n, 16, 16, 128)"},
    {"LeakyReLU(alpha=0.3)", "(n, 16, 16, 128)"},
    {"Conv2D(filters=256, kernel-size=5, strides=2)", "(n, 8, 8, 256)"},
    {"LeakyReLU(alpha=0.3)", "(n, 8, 8, 256)"},
    {"Flatten", "(n, 16384)"},
    {"Dense(1)", "(n, 1)"},
};

inline const TableRows kSingleClassifierTable = {
    {"Input B-scan", "(n, 256, 256, 1)"},
    {"Conv2D(filters=2, kernel size=1, strides=2)", "(n, 128, 128, 2)"},
    {"LeakyReLU(alpha=0.3)", "(n, 128, 128, 2)"},
    {"Conv2D(filters=4, kernel size=1, strides=2)", "(n, 64, 64, 4)"},
    {"LeakyReLU(alpha=0.3)", "(n, 64, 64, 4)"},
    {"Flatten", "(n, 16384)"},
    {"Dense", "(n, 3)"},
};

inline const TableRows kCombinedClassifierTable = {
    {"Input Time B-scan", "(n, 256, 256, 1)"},
    {"Input Frequency B-scan", "(n, 256, 256, 1)"},
    {"SingleClassifier(Time B-scan)", "(n, 64, 64, 4)"},
    {"SingleClassifier(Frequency B-scan)", "(n, 64, 64, 4)"},
    {"Multiply", "(n, 64, 64, 4)"},
    {"Flatten", "(n, 16384)"},
    {"Dense", "(n, 3)"},
};

/// Operation name without its argument list: "Dense(1)" -> "Dense",
/// "Input $N(0, 1)$" -> "Input". Names whose parentheses are part of the
/// label ("SingleClassifier(Time B-scan)") are kept whole.
inline std::string base_op(const std::string& op) {
  if (op.starts_with("SingleClassifier(")) return op;
  const auto cut = op.find_first_of(" (");
  if (cut == std::string::npos || op.starts_with("Input ")) {
    return op.starts_with("Input $") ? "Input" : op;
  }
  return op.substr(0, cut);
}

/// Empty when the trace matches the table, otherwise a description of the
/// first mismatch.
inline std::string compare_trace(const std::vector<nn::ShapeRecord>& trace, const TableRows& table) {
  if (trace.size() != table.size()) {
    return "row count " + std::to_string(trace.size()) + " != " + std::to_string(table.size());
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string shape = nn::format_shape(trace[i].shape);
    if (trace[i].op != base_op(table[i].first) || shape != table[i].second) {
      return "row " + std::to_string(i) + ": got " + trace[i].op + " " + shape + ", expected " +
             table[i].first + " " + table[i].second;
    }
  }
  return {};
}

}  // namespace gprlab::testing
