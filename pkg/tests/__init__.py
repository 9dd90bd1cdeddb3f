# RTT tests
