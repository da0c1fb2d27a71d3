#pragma once

#include <stdexcept>
#include <string>

namespace appraisal {

// Base class of every failure the library raises.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NegativeEntry : public Error {
 public:
  NegativeEntry(int row, int col, double value)
      : Error("negative entry c(" + std::to_string(row) + "," + std::to_string(col) +
              ") = " + std::to_string(value)),
        row(row), col(col), value(value) {}
  int row, col;
  double value;
};

class NonzeroDiagonal : public Error {
 public:
  NonzeroDiagonal(int index, double value)
      : Error("nonzero diagonal entry c(" + std::to_string(index) + "," +
              std::to_string(index) + ") = " + std::to_string(value)),
        index(index), value(value) {}
  int index;
  double value;
};

class RowSumViolation : public Error {
 public:
  RowSumViolation(int row, double deviation)
      : Error("row " + std::to_string(row) + " sum deviates from 1 by " +
              std::to_string(deviation)),
        row(row), deviation(deviation) {}
  int row;
  double deviation;
};

class NotOnSimplex : public Error {
 public:
  explicit NotOnSimplex(double residual)
      : Error("vector is not on the simplex (residual " + std::to_string(residual) + ")"),
        residual(residual) {}
  double residual;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(int expected, int got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)),
        expected(expected), got(got) {}
  int expected, got;
};

class OutOfHorizon : public Error {
 public:
  explicit OutOfHorizon(const std::string& what) : Error(what) {}
};

class NotDoublyStochastic : public Error {
 public:
  explicit NotDoublyStochastic(int matrix_index)
      : Error("matrix " + std::to_string(matrix_index) + " in the pool is not doubly stochastic"),
        matrix_index(matrix_index) {}
  int matrix_index;
};

class InvalidParameter : public Error {
 public:
  explicit InvalidParameter(const std::string& what) : Error(what) {}
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(int iterations)
      : Error("no convergence after " + std::to_string(iterations) + " iterations"),
        iterations(iterations) {}
  int iterations;
};

class ConvergedToVertex : public Error {
 public:
  explicit ConvergedToVertex(int vertex)
      : Error("solver collapsed to the vertex equilibrium e_" + std::to_string(vertex + 1)),
        vertex(vertex) {}
  int vertex;
};

class NoFeasibleRoot : public Error {
 public:
  NoFeasibleRoot() : Error("no quadratic root satisfies the interval and mean constraints") {}
};

class SimplexBlowup : public Error {
 public:
  SimplexBlowup(double t, double violation)
      : Error("state left the simplex at t = " + std::to_string(t) + " by " +
              std::to_string(violation)),
        t(t), violation(violation) {}
  double t, violation;
};

class AssumptionViolated : public Error {
 public:
  explicit AssumptionViolated(const std::string& what) : Error(what) {}
};

class InsufficientHorizon : public Error {
 public:
  InsufficientHorizon(double required, double available)
      : Error("trajectory ends at t = " + std::to_string(available) +
              " but t = " + std::to_string(required) + " is required"),
        required(required), available(available) {}
  double required, available;
};

class GenerationFailed : public Error {
 public:
  explicit GenerationFailed(const std::string& what) : Error(what) {}
};

}  // namespace appraisal
