#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sbp {

// Binary max-heap over dense integer ids with a position index, so priority
// updates and deletions of arbitrary entries cost O(log n). Ties are broken
// FIFO by last-enqueue sequence number: among equal priorities the entry
// (re)enqueued earliest wins. This makes every pop order deterministic.
class IndexedMaxHeap {
 public:
  struct Entry {
    int id;
    double priority;
  };

  explicit IndexedMaxHeap(int capacity) : pos_(capacity, -1) {}

  int size() const { return static_cast<int>(heap_.size()); }
  bool empty() const { return heap_.empty(); }
  bool contains(int id) const { return pos_[id] >= 0; }

  double priority_of(int id) const {
    check_present(id);
    return heap_[pos_[id]].pri;
  }

  void push(int id, double priority) {
    if (contains(id)) throw std::logic_error("heap push: id already present");
    heap_.push_back({priority, next_seq_++, id});
    pos_[id] = size() - 1;
    sift_up(size() - 1);
  }

  // Re-stamps the sequence number: an update counts as an enqueue.
  void update(int id, double priority) {
    check_present(id);
    const int at = pos_[id];
    heap_[at].pri = priority;
    heap_[at].seq = next_seq_++;
    if (!sift_up(at)) sift_down(at);
  }

  void push_or_update(int id, double priority) {
    if (contains(id))
      update(id, priority);
    else
      push(id, priority);
  }

  void erase(int id) {
    check_present(id);
    const int at = pos_[id];
    swap_nodes(at, size() - 1);
    pos_[id] = -1;
    heap_.pop_back();
    if (at < size()) {
      if (!sift_up(at)) sift_down(at);
    }
  }

  Entry peek() const {
    if (empty()) throw std::logic_error("heap peek: empty");
    return {heap_[0].id, heap_[0].pri};
  }

  Entry pop() {
    Entry top = peek();
    erase(top.id);
    return top;
  }

 private:
  struct Node {
    double pri;
    std::uint64_t seq;
    int id;
  };

  static bool better(const Node& a, const Node& b) {
    if (a.pri != b.pri) return a.pri > b.pri;
    return a.seq < b.seq;
  }

  void check_present(int id) const {
    if (id < 0 || id >= static_cast<int>(pos_.size()) || pos_[id] < 0)
      throw std::logic_error("heap: id not present");
  }

  void swap_nodes(int a, int b) {
    if (a == b) return;
    std::swap(heap_[a], heap_[b]);
    pos_[heap_[a].id] = a;
    pos_[heap_[b].id] = b;
  }

  bool sift_up(int at) {
    bool moved = false;
    while (at > 0) {
      const int parent = (at - 1) / 2;
      if (!better(heap_[at], heap_[parent])) break;
      swap_nodes(at, parent);
      at = parent;
      moved = true;
    }
    return moved;
  }

  void sift_down(int at) {
    const int n = size();
    while (true) {
      int best = at;
      const int l = 2 * at + 1, r = 2 * at + 2;
      if (l < n && better(heap_[l], heap_[best])) best = l;
      if (r < n && better(heap_[r], heap_[best])) best = r;
      if (best == at) return;
      swap_nodes(at, best);
      at = best;
    }
  }

  std::vector<Node> heap_;
  std::vector<int> pos_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace sbp
