# RTT output records
