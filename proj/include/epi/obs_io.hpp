#ifndef EPI_OBS_IO_HPP
#define EPI_OBS_IO_HPP

#include <stdexcept>
#include <string>

#include "epi/calendar.hpp"
#include "epi/observation.hpp"
#include "epi/severity.hpp"
#include "epi/transmission.hpp"

namespace epi {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV schemas:
//   weekly file    header "week,y_h,y_ic", one row per week 0..T-1
//   daily GP file  header "day,y_g", one row per day 0..U
//   virology file  header "week,tested,positive", any subset of weeks
struct ObservationPaths {
  std::string weekly;
  std::string gp;        // optional, "" = absent
  std::string virology;  // optional, "" = absent
};

ObservationSet load_observations(const ObservationPaths& paths,
                                 const Calendar& cal);
void save_observations(const ObservationSet& obs, const Calendar& cal,
                       const ObservationPaths& paths);

void save_xi_csv(const InfectionSeries& xi, const std::string& path);
void save_latent_csv(const LatentPath& path, const std::string& file);

}  // namespace epi

#endif
