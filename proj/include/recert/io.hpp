#pragma once

#include <optional>
#include <string>

#include "recert/certainty.hpp"
#include "recert/game.hpp"
#include "recert/objective.hpp"
#include "recert/synthesis.hpp"
#include "recert/tracking.hpp"

namespace recert {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error(format(line, column, message)),
        line(line),
        column(column),
        message_(message) {}

  /// The bare message, without the line:column prefix.
  const std::string& message() const { return message_; }

  int line = 0;    // 1-based; 0 when the text parsed but made no sense
  int column = 0;  // 1-based

 private:
  static std::string format(int line, int column, const std::string& message) {
    if (line <= 0) return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }
  std::string message_;
};

struct GameFile {
  std::string name;
  GameStructure game;
  std::optional<ObjectiveSpec> objective;
};

/// Parses the JSON game format. Structural soundness (totality and friends)
/// is not enforced here; run validate_structure for that.
GameFile parse_game_file(const std::string& text);
GameFile load_game_file(const std::string& path);
std::string serialise_game_file(const GameFile& file);

std::string serialise_strategies(const GameStructure& g,
                                 const std::vector<StrategyMachine>& machines);
std::vector<StrategyMachine> parse_strategies(const GameStructure& g, const std::string& text);
std::vector<StrategyMachine> load_strategies(const GameStructure& g, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Graphviz views. All exports are deterministic for fixed inputs.
std::string export_dot_beliefs(const GameStructure& g, const CertaintyAutomaton& ca);
std::string export_dot_arena(const GameStructure& g, const TrackingArena& arena);
std::string export_dot_strategy(const GameStructure& g,
                                const std::vector<StrategyMachine>& machines);
std::string export_dot_verification(const GameStructure& g, const VerificationProduct& product);

}  // namespace recert
