#ifndef EPI_CHAIN_IO_HPP
#define EPI_CHAIN_IO_HPP

#include <string>

#include "epi/sampler.hpp"

namespace epi {

// One JSON record per iteration, full double precision round trip.
void save_chain(const ChainResult& chain, const std::string& path);
ChainResult load_chain(const std::string& path);

void save_summary_csv(const ChainSummary& summary, const std::string& path);

}  // namespace epi

#endif
