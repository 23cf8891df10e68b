"""Domain operations: Retinex, dehazing, duality, synthetic fog and metrics"""
