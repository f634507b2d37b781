#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "tryon/ag/tensor.hpp"

namespace tryon::ag {

// Reverse-mode autodiff over Tensor<T>. Nodes form a DAG through parent
// links; backward() replays backfns in reverse creation order, which is a
// valid topological order for a dynamically built graph.
template <typename T>
struct Node {
  Tensor<T> val;
  Tensor<T> grad;  // allocated lazily, same shape as val
  bool requires_grad = false;
  std::uint64_t order = 0;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backfn;  // pushes this->grad into parents

  void ensure_grad() {
    if (grad.v.empty()) grad = Tensor<T>::zeros(val.shape);
  }
};

namespace detail {
inline std::uint64_t& node_counter() {
  thread_local std::uint64_t counter = 0;
  return counter;
}
}  // namespace detail

template <typename T>
class Var {
 public:
  Var() = default;

  explicit Var(Tensor<T> value, bool requires_grad = false) {
    n_ = std::make_shared<Node<T>>();
    n_->val = std::move(value);
    n_->requires_grad = requires_grad;
    n_->order = detail::node_counter()++;
  }

  static Var make_op(Tensor<T> value, std::vector<Var> parents,
                     std::function<void(Node<T>&)> backfn) {
    Var out(std::move(value));
    bool needs = false;
    for (const auto& p : parents) needs = needs || p.requires_grad();
    if (needs) {
      out.n_->requires_grad = true;
      out.n_->parents.reserve(parents.size());
      for (auto& p : parents) out.n_->parents.push_back(p.n_);
      out.n_->backfn = std::move(backfn);
    }
    return out;
  }

  bool defined() const { return static_cast<bool>(n_); }
  const Tensor<T>& value() const { return n_->val; }
  Tensor<T>& value() { return n_->val; }
  const Tensor<T>& grad() const { return n_->grad; }
  bool requires_grad() const { return n_ && n_->requires_grad; }
  const std::vector<int>& shape() const { return n_->val.shape; }
  std::int64_t numel() const { return n_->val.numel(); }
  std::uint64_t order() const { return n_->order; }

  std::shared_ptr<Node<T>> node() const { return n_; }

  void zero_grad() {
    if (n_) n_->grad = Tensor<T>();
  }

  // Leaf-only: toggling this on interior nodes would corrupt the tape.
  void set_requires_grad(bool rg) {
    n_->requires_grad = rg;
    if (!rg) n_->grad = Tensor<T>();
  }

  // Leaf copy sharing no graph history.
  Var detach() const { return Var(n_->val, false); }

  // Accumulates d(this)/d(leaf) into every reachable leaf's grad.
  void backward() const {
    n_->ensure_grad();
    for (auto& g : n_->grad.v) g = T(1);
    backward_from(n_.get());
  }

  static void backward_from(Node<T>* root) {
    if (!root->requires_grad) return;
    std::vector<Node<T>*> nodes;
    std::unordered_set<Node<T>*> seen;
    std::vector<Node<T>*> stack{root};
    seen.insert(root);
    while (!stack.empty()) {
      Node<T>* cur = stack.back();
      stack.pop_back();
      nodes.push_back(cur);
      for (auto& p : cur->parents) {
        if (p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
      }
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const Node<T>* a, const Node<T>* b) { return a->order > b->order; });
    for (Node<T>* node : nodes) {
      if (node->backfn && !node->grad.v.empty()) node->backfn(*node);
    }
  }

 private:
  std::shared_ptr<Node<T>> n_;
};

template <typename T>
Var<T> constant(Tensor<T> t) {
  return Var<T>(std::move(t), false);
}

template <typename T>
Var<T> parameter(Tensor<T> t) {
  return Var<T>(std::move(t), true);
}

}  // namespace tryon::ag
