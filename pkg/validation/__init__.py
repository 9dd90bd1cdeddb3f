# RTT validation: Monte Carlo checks with counter-based streams
