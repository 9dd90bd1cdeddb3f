# RTT utils
