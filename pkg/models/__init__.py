# RTT models: scale-mixture and symmetric tails, robust test dispatch
