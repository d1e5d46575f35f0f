// Three-party ring: the eavesdropper learns a's key.
#include <iostream>

#include <aediag.hpp>

using namespace aediag;

int main() {
  auto d = protocols::gen_dh_ring(protocols::default_dh_params(3));
  std::cout << "ring: " << (check_ifo(d).ok ? "IFO holds" : "IFO fails") << "\n";

  LeakRule rule;
  rule.arrow = d.theory().modexp().pow(3);
  rule.member = static_cast<std::size_t>(d.universe()->index_of("A"));
  rule.add = Tag::of(d.universe(), {"E"});

  auto result = apply_leak(d, {rule});
  for (const auto& e : result.diff.entries)
    std::cout << e.edge.src << "->" << e.edge.dst << " " << e.old_tag.str() << " -> " << e.new_tag.str() << "\n";
}
