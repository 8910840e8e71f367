# Test Suite for the WPSN allocator
# Harvester models, channel gain, power-split solver and experiment harnesses
