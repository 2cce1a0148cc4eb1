#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jamgame {

// Position of a jammer action history in the history tree. Stage t holds
// histories of length t - 1; indices within a stage are the base-|A_j|
// value of the sequence (first action most significant).
struct HistoryNode {
  int stage = 1;
  std::size_t index = 0;
  friend bool operator==(const HistoryNode&, const HistoryNode&) = default;
};

class HistoryIndex {
 public:
  // Histories of length 0..depth, i.e. stages 1..depth+1.
  HistoryIndex(std::size_t branching, int depth);

  std::size_t branching() const { return branching_; }
  int depth() const { return depth_; }
  int last_stage() const { return depth_ + 1; }

  // Number of histories at a stage: branching^(stage-1).
  std::size_t layer_size(int stage) const;
  // Number of histories over stages 1..up_to_stage.
  std::size_t count_through(int up_to_stage) const;
  std::size_t total_nodes() const { return count_through(last_stage()); }
  // Position of a node when all stages are laid out back to back.
  std::size_t flat(HistoryNode node) const { return offsets_.at(node.stage - 1) + node.index; }

  HistoryNode encode(std::span<const std::size_t> history) const;
  std::vector<std::size_t> decode(HistoryNode node) const;
  std::vector<HistoryNode> children(HistoryNode node) const;
  HistoryNode child(HistoryNode node, std::size_t action) const;
  HistoryNode parent(HistoryNode node) const;

 private:
  void check(HistoryNode node) const;

  std::size_t branching_;
  int depth_;
  std::vector<std::size_t> offsets_;  // offsets_[s] = nodes in stages 1..s
};

}  // namespace jamgame
