#include "jamgame/history_tree.hpp"

#include <string>

#include "jamgame/errors.hpp"

namespace jamgame {

HistoryIndex::HistoryIndex(std::size_t branching, int depth)
    : branching_(branching), depth_(depth) {
  if (branching == 0) throw DataError("history tree needs at least one action");
  if (depth < 0) throw DataError("history tree depth must be >= 0");
  offsets_.push_back(0);
  std::size_t layer = 1;
  for (int s = 1; s <= depth + 1; ++s) {
    offsets_.push_back(offsets_.back() + layer);
    layer *= branching;
  }
}

std::size_t HistoryIndex::layer_size(int stage) const {
  if (stage < 1 || stage > last_stage()) throw DataError("stage out of range");
  return offsets_[stage] - offsets_[stage - 1];
}

std::size_t HistoryIndex::count_through(int up_to_stage) const {
  if (up_to_stage < 0 || up_to_stage > last_stage()) throw DataError("stage out of range");
  return offsets_[up_to_stage];
}

void HistoryIndex::check(HistoryNode node) const {
  if (node.stage < 1 || node.stage > last_stage())
    throw DataError("stage " + std::to_string(node.stage) + " out of range");
  if (node.index >= layer_size(node.stage)) throw DataError("history index out of range");
}

HistoryNode HistoryIndex::encode(std::span<const std::size_t> history) const {
  if (history.size() > static_cast<std::size_t>(depth_))
    throw DataError("history longer than tree depth");
  std::size_t index = 0;
  for (std::size_t a : history) {
    if (a >= branching_) throw DataError("action id out of range");
    index = index * branching_ + a;
  }
  return {static_cast<int>(history.size()) + 1, index};
}

std::vector<std::size_t> HistoryIndex::decode(HistoryNode node) const {
  check(node);
  std::vector<std::size_t> seq(static_cast<std::size_t>(node.stage - 1));
  std::size_t index = node.index;
  for (std::size_t k = seq.size(); k-- > 0;) {
    seq[k] = index % branching_;
    index /= branching_;
  }
  return seq;
}

HistoryNode HistoryIndex::child(HistoryNode node, std::size_t action) const {
  check(node);
  if (node.stage >= last_stage()) throw DataError("stage overflow: node has no children");
  if (action >= branching_) throw DataError("action id out of range");
  return {node.stage + 1, node.index * branching_ + action};
}

std::vector<HistoryNode> HistoryIndex::children(HistoryNode node) const {
  std::vector<HistoryNode> out;
  out.reserve(branching_);
  for (std::size_t k = 0; k < branching_; ++k) out.push_back(child(node, k));
  return out;
}

HistoryNode HistoryIndex::parent(HistoryNode node) const {
  check(node);
  if (node.stage == 1) throw DataError("root has no parent");
  return {node.stage - 1, node.index / branching_};
}

}  // namespace jamgame
