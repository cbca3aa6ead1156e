"""
测试模块

包含 FastAPI Packing 服务的所有测试
"""
