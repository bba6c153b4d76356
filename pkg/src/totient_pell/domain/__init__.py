"""领域层 - 业务模型与异常"""
