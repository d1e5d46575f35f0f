#pragma once

#include <stdexcept>
#include <string>

namespace aediag {

// Every failure raised by the library carries one of these codes so that
// front-ends can map them onto exit statuses without string matching.
enum class ErrorCode {
  Universe,
  Composition,
  Eval,
  Name,
  DuplicateNodeId,
  UnknownNode,
  TypeMismatch,
  ParallelEdge,
  SelfLoop,
  CycleDetected,
  PathExplosion,
  NoIfoAbove,
  NotIfo,
  AmbiguousPolygon,
  BadTarget,
  CountExplosion,
  StructuralMismatch,
  BadParams,
  PoolsDoNotCommute,
  Syntax,
  Schema,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Universe: return "UniverseError";
    case ErrorCode::Composition: return "CompositionError";
    case ErrorCode::Eval: return "EvalError";
    case ErrorCode::Name: return "NameError";
    case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::ParallelEdge: return "ParallelEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::PathExplosion: return "PathExplosion";
    case ErrorCode::NoIfoAbove: return "NoIfoAbove";
    case ErrorCode::NotIfo: return "NotIfo";
    case ErrorCode::AmbiguousPolygon: return "AmbiguousPolygon";
    case ErrorCode::BadTarget: return "BadTarget";
    case ErrorCode::CountExplosion: return "CountExplosion";
    case ErrorCode::StructuralMismatch: return "StructuralMismatch";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::PoolsDoNotCommute: return "PoolsDoNotCommute";
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::Schema: return "SchemaError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aediag
