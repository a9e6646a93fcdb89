#pragma once

#include <array>
#include <cstddef>
#include <iomanip>
#include <ostream>
#include <string_view>

namespace photonn {

/// Published comparison row, kept as citable text plus parsed values.
struct ReferenceRow {
    std::string_view chip;
    std::string_view mac_rate;        ///< per processor
    std::string_view energy_per_mac;  ///< pJ
    std::string_view fan_in;
    std::string_view area_per_mac;    ///< um^2
    std::string_view precision;       ///< bit
    std::string_view notes;           ///< footnote marks
    double mac_rate_hz;
    double energy_pj;
    double fan_in_value;
    double area_um2;
    double precision_bits;
};

inline constexpr std::array<ReferenceRow, 6> reference_processors{{
    {"Photonic Hybrid III-V/Si", "20 GHz", "0.26", "108", "205", "5.1", "1", 20e9, 0.26, 108, 205, 5.1},
    {"Sub-λ Photonics (future trend)", "200 GHz", "0.0007", "~200", "20", "8", "2", 200e9, 0.0007, 200, 20, 8},
    {"HICANN", "22.4 MHz", "198.4", "224", "780", "4", "", 22.4e6, 198.4, 224, 780, 4},
    {"TrueNorth", "2.5 kHz", ".27", "256", "4.9", "5", "", 2.5e3, 0.27, 256, 4.9, 5},
    {"Neurogrid", "40.1 kHz", "119", "4096", "7.1", "13", "", 40.1e3, 119, 4096, 7.1, 13},
    {"SpiNNaker", "3.2 kHz", "6e5", "320", "217", "16", "6", 3.2e3, 6e5, 320, 217, 16},
}};

inline constexpr std::array<std::string_view, 6> reference_footnotes{{
    "III-V/Si Hybrid stands for estimated metrics of a spiking neural network in a photonic integrated "
    "circuit in a III-V/Si Hybrid platform.",
    "Sub-λ stands for estimated metrics for a platform using optimized sub-wavelength structures, such as "
    "photonic crystals.",
    "A MAC event occurs each time a spike is integrated by the neuron. Neuron fan-in refers to the number of "
    "possible connections to a single neuron.",
    "The energy per MAC for HICANN, TrueNorth, Neurogrid, SpiNNaker were estimated by dividing wall-plug power "
    "to number of neurons and to operational MAC rate per processor.",
    "The area per MAC was estimated by dividing the chip/board size to the number of MAC units (neuron count "
    "times fan-in). All numbers therefore include overheads in terms of footprint and area.",
    "Neurons, synapses and spikes are digitally encoded in event headers that travel around co-integrated "
    "processor cores. So all numbers here are based on a typical application example.",
}};

/// Pipe-separated rendering of the reference rows and their footnotes.
inline void print_reference_table(std::ostream& os) {
    os << "Chip | MAC rate/processor [3] | Energy/MAC (pJ) [4] | Processor fan-in | Area/MAC (um^2) [5] | "
          "Synapse precision (bit)\n";
    for (const auto& r : reference_processors) {
        os << r.chip;
        if (!r.notes.empty()) os << " [" << r.notes << "]";
        os << " | " << r.mac_rate << " | " << r.energy_per_mac << " | " << r.fan_in << " | " << r.area_per_mac
           << " | " << r.precision << '\n';
    }
    os << '\n';
    for (std::size_t i = 0; i < reference_footnotes.size(); ++i)
        os << '[' << i + 1 << "] " << reference_footnotes[i] << '\n';
}

}  // namespace photonn
