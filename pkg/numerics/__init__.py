# RTT numerics: special functions and statistic-level identities
