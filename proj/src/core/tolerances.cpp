#include "tolerances.hpp"

#include <utility>

#include "errors.hpp"

namespace matsl {

namespace {

using Field = double Tolerances::*;

const std::pair<const char*, Field> kFields[] = {
    {"integrator_rel", &Tolerances::integrator_rel},
    {"wronskian", &Tolerances::wronskian},
    {"near_singular", &Tolerances::near_singular},
    {"dkernel_coincide", &Tolerances::dkernel_coincide},
    {"refine_residual", &Tolerances::refine_residual},
    {"residue_agree", &Tolerances::residue_agree},
    {"cluster_rel", &Tolerances::cluster_rel},
    {"omega_group", &Tolerances::omega_group},
    {"omega_diag", &Tolerances::omega_diag},
    {"rank_rel", &Tolerances::rank_rel},
    {"main_singular", &Tolerances::main_singular},
    {"tail_warn", &Tolerances::tail_warn},
    {"check_lambda_real", &Tolerances::check_lambda_real},
    {"check_hermitian", &Tolerances::check_hermitian},
    {"check_psd", &Tolerances::check_psd},
    {"check_gram_sigma", &Tolerances::check_gram_sigma},
    {"check_tail_factor", &Tolerances::check_tail_factor},
    {"structural_kernel", &Tolerances::structural_kernel},
    {"structural_sym", &Tolerances::structural_sym},
    {"structural_weyl", &Tolerances::structural_weyl},
    {"contour_nodes", &Tolerances::contour_nodes},
    {"max_contour_nodes", &Tolerances::max_contour_nodes},
};

}  // namespace

void Tolerances::set(const std::string& key, double value) {
  for (const auto& [name, field] : kFields)
    if (key == name) {
      this->*field = value;
      return;
    }
  raise(ErrorCode::InvalidArgument, "unknown tolerance key '" + key + "'");
}

double Tolerances::get(const std::string& key) const {
  for (const auto& [name, field] : kFields)
    if (key == name) return this->*field;
  raise(ErrorCode::InvalidArgument, "unknown tolerance key '" + key + "'");
}

std::vector<std::string> Tolerances::keys() {
  std::vector<std::string> out;
  for (const auto& [name, field] : kFields) out.emplace_back(name);
  return out;
}

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::AssumptionOneViolated: return "AssumptionOneViolated";
    case ErrorCode::ContourCollision: return "ContourCollision";
    case ErrorCode::TruncationTooLarge: return "TruncationTooLarge";
    case ErrorCode::MainEquationSingular: return "MainEquationSingular";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace matsl
